// SPDX-License-Identifier: Apache-2.0
//
// csifb: CSI feedback compression lab
// Copyright (C) 2026 The csifb authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "csifb/eval/metrics.hpp"

#include "csifb/error.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace csifb::eval
{
    namespace
    {
        void require_same(const CMatrix &a, const CMatrix &b, const char *op)
        {
            if (a.rows() != b.rows() || a.cols() != b.cols())
                throw DimensionError(std::string(op) + ": shapes differ (" + std::to_string(a.rows()) + "x" +
                                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                     std::to_string(b.cols()) + ")");
        }

        void require_pairs(std::size_t a, std::size_t b, const char *op)
        {
            if (a != b)
                throw DimensionError(std::string(op) + ": sample counts differ");
            if (a == 0)
                throw DimensionError(std::string(op) + ": no samples");
        }
    }

    double to_db(double linear)
    {
        if (linear <= 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(linear);
    }

    std::string format_db(double db, int precision)
    {
        if (std::isinf(db) && db < 0)
            return "-inf";
        std::ostringstream os;
        os << std::fixed << std::setprecision(precision) << db;
        return os.str();
    }

    double nmse_sample(const CMatrix &h, const CMatrix &hhat)
    {
        require_same(h, hhat, "nmse");
        const double denom = h.squaredNorm();
        if (!(denom > 0.0))
            throw ContractError("nmse: reference matrix has zero norm");
        return (hhat - h).squaredNorm() / denom;
    }

    double cosine_sample(const CMatrix &h, const CMatrix &hhat)
    {
        require_same(h, hhat, "cosine_similarity");
        double acc = 0.0;
        for (Eigen::Index k = 0; k < h.cols(); ++k)
        {
            const double nh = h.col(k).norm();
            const double nr = hhat.col(k).norm();
            if (!(nh > 0.0) || !(nr > 0.0))
                throw ContractError("cosine_similarity: zero column " + std::to_string(k));
            acc += std::abs(hhat.col(k).dot(h.col(k))) / (nh * nr);
        }
        return acc / static_cast<double>(h.cols());
    }

    Nmse nmse(std::span<const PrecoderChannelMatrix> h, std::span<const PrecoderChannelMatrix> hhat)
    {
        require_pairs(h.size(), hhat.size(), "nmse");
        double acc = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i)
            acc += nmse_sample(h[i].matrix(), hhat[i].matrix());
        const double linear = acc / static_cast<double>(h.size());
        return {linear, to_db(linear)};
    }

    Nmse nmse(const PrecoderChannelMatrix &h, const PrecoderChannelMatrix &hhat)
    {
        return nmse(std::span(&h, 1), std::span(&hhat, 1));
    }

    double cosine_similarity(std::span<const PrecoderChannelMatrix> h, std::span<const PrecoderChannelMatrix> hhat)
    {
        require_pairs(h.size(), hhat.size(), "cosine_similarity");
        double acc = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i)
            acc += cosine_sample(h[i].matrix(), hhat[i].matrix());
        return acc / static_cast<double>(h.size());
    }

    double cosine_similarity(const PrecoderChannelMatrix &h, const PrecoderChannelMatrix &hhat)
    {
        return cosine_similarity(std::span(&h, 1), std::span(&hhat, 1));
    }
}
