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

#include "csifb/eval/noise.hpp"

#include "csifb/error.hpp"

#include <cmath>
#include <sstream>

namespace csifb::eval
{
    void NoiseSpec::validate() const
    {
        if (!(snr_low_db <= snr_high_db) || !std::isfinite(snr_low_db) || !std::isfinite(snr_high_db))
            throw ConfigError("noise: need finite snr_low_db <= snr_high_db");
    }

    std::string NoiseSpec::label() const
    {
        std::ostringstream os;
        os << snr_low_db << "-" << snr_high_db;
        return os.str();
    }

    NoiseSpec NoiseSpec::parse(const std::string &text)
    {
        const auto dash = text.find('-', 1);
        if (dash == std::string::npos)
            throw ConfigError("noise: expected \"low-high\" in dB, got \"" + text + "\"");
        NoiseSpec spec;
        try
        {
            spec.snr_low_db = std::stod(text.substr(0, dash));
            spec.snr_high_db = std::stod(text.substr(dash + 1));
        }
        catch (const std::exception &)
        {
            throw ConfigError("noise: cannot parse \"" + text + "\"");
        }
        spec.validate();
        return spec;
    }

    std::vector<NoiseSpec> NoiseSpec::presets()
    {
        return {{0.0, 5.0}, {5.0, 10.0}, {10.0, 15.0}};
    }

    CMatrix add_awgn(const CMatrix &h, double snr_db, std::mt19937_64 &rng)
    {
        const double signal = h.squaredNorm() / static_cast<double>(h.size());
        const double variance = signal / std::pow(10.0, snr_db / 10.0);
        std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
        CMatrix out = h;
        for (Eigen::Index i = 0; i < out.size(); ++i)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i) += channel::cdouble(re, im);
        }
        return out;
    }

    std::vector<CMatrix> add_awgn(std::span<const PrecoderChannelMatrix> samples, const NoiseSpec &spec,
                                  std::mt19937_64 &rng)
    {
        spec.validate();
        std::uniform_real_distribution<double> snr(spec.snr_low_db, spec.snr_high_db);
        std::vector<CMatrix> out;
        out.reserve(samples.size());
        for (const auto &s : samples)
        {
            const double draw = spec.snr_low_db == spec.snr_high_db ? spec.snr_low_db : snr(rng);
            out.push_back(add_awgn(s.matrix(), draw, rng));
        }
        return out;
    }
}
