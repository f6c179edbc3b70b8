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

#include "csifb/nn/optim.hpp"

#include "csifb/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace csifb::nn
{
    template <typename T>
    Adam<T>::Adam(std::vector<Tensor<T>> params, Hyper hyper) : params_(std::move(params)), hyper_(hyper)
    {
        for (const auto &p : params_)
        {
            m_.emplace_back(p.size(), 0.0);
            v_.emplace_back(p.size(), 0.0);
        }
    }

    template <typename T>
    void Adam<T>::step(double lr)
    {
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (!params_[i].has_grad())
                throw ContractError("adam: parameter " + std::to_string(i) + " " +
                                    ad::shape_string(params_[i].shape()) + " has no gradient");
        ++step_;
        const double c1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(step_));
        const double c2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(step_));
        for (std::size_t i = 0; i < params_.size(); ++i)
        {
            auto w = params_[i].data();
            auto g = params_[i].grad();
            auto &m = m_[i];
            auto &v = v_[i];
            for (std::size_t j = 0; j < w.size(); ++j)
            {
                const double gj = static_cast<double>(g[j]);
                m[j] = hyper_.beta1 * m[j] + (1.0 - hyper_.beta1) * gj;
                v[j] = hyper_.beta2 * v[j] + (1.0 - hyper_.beta2) * gj * gj;
                const double mhat = m[j] / c1;
                const double vhat = v[j] / c2;
                w[j] = static_cast<T>(static_cast<double>(w[j]) - lr * mhat / (std::sqrt(vhat) + hyper_.eps));
            }
        }
    }

    template <typename T>
    void Adam<T>::zero_grad()
    {
        for (auto &p : params_)
            p.zero_grad();
    }

    double CosineWarmupSchedule::lr(int epoch) const
    {
        if (warmup < 0 || warmup >= total || !(lr_min > 0.0) || lr_max < lr_min)
            throw ContractError("schedule: needs 0 <= warmup < total and 0 < lr_min <= lr_max");
        if (epoch < 0 || epoch > total)
            throw ContractError("schedule: epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(total) +
                                "]");
        if (epoch < warmup)
            return lr_min + (lr_max - lr_min) * static_cast<double>(epoch) / static_cast<double>(warmup);
        const double progress = static_cast<double>(epoch - warmup) / static_cast<double>(total - warmup);
        return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * progress));
    }

    template class Adam<float>;
    template class Adam<double>;
}
