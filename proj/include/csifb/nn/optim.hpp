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

#pragma once

#include "csifb/nn/layers.hpp"

#include <cstdint>
#include <vector>

namespace csifb::nn
{
    /// Adam with bias correction.
    template <typename T>
    class Adam
    {
    public:
        struct Hyper
        {
            double beta1 = 0.9;
            double beta2 = 0.999;
            double eps = 1e-8;
        };

        explicit Adam(std::vector<Tensor<T>> params, Hyper hyper = {});

        // Every parameter must carry a gradient; throws ContractError otherwise.
        void step(double lr);
        void zero_grad();

        std::uint64_t steps() const { return step_; }
        const std::vector<std::vector<double>> &first_moments() const { return m_; }
        const std::vector<std::vector<double>> &second_moments() const { return v_; }

    private:
        std::vector<Tensor<T>> params_;
        std::vector<std::vector<double>> m_, v_;
        Hyper hyper_;
        std::uint64_t step_ = 0;
    };

    /// Linear warm-up from lr_min to lr_max over [0, warmup], then cosine annealing
    /// down to lr_min at `total`.
    struct CosineWarmupSchedule
    {
        double lr_min = 1e-4;
        double lr_max = 1e-2;
        int warmup = 30;
        int total = 400;

        double lr(int epoch) const;
    };

    extern template class Adam<float>;
    extern template class Adam<double>;
}
