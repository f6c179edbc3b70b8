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

#include "csifb/nn/layers.hpp"

#include "csifb/error.hpp"
#include "csifb/ops.hpp"

#include <cmath>

namespace csifb::nn
{
    namespace
    {
        template <typename T>
        Tensor<T> glorot(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64 &rng)
        {
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            std::uniform_real_distribution<double> dist(-limit, limit);
            std::vector<T> data(ad::shape_size(shape));
            for (auto &v : data)
                v = static_cast<T>(dist(rng));
            return Tensor<T>(std::move(shape), std::move(data), true);
        }
    }

    template <typename T>
    Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kh, std::size_t kw,
                      std::mt19937_64 &rng)
        : weight_(glorot<T>({out_channels, in_channels, kh, kw}, in_channels * kh * kw, out_channels * kh * kw, rng)),
          bias_(Shape{out_channels}, T(0), true)
    {
    }

    template <typename T>
    Tensor<T> Conv2d<T>::forward(Tape<T> &tape, const Tensor<T> &x) const
    {
        return conv2d(tape, x, weight_, bias_);
    }

    template <typename T>
    void Conv2d<T>::collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const
    {
        params.push_back({prefix + ".weight", weight_});
        params.push_back({prefix + ".bias", bias_});
    }

    template <typename T>
    BatchNorm<T>::BatchNorm(std::size_t channels, T momentum, T eps)
        : gamma_(Shape{channels}, T(1), true), beta_(Shape{channels}, T(0), true),
          running_mean_(Shape{channels}, T(0)), running_var_(Shape{channels}, T(1)), momentum_(momentum), eps_(eps)
    {
        if (!(momentum > T(0) && momentum < T(1)))
            throw ContractError("batch norm momentum must lie in (0, 1)");
    }

    template <typename T>
    Tensor<T> BatchNorm<T>::forward(Tape<T> &tape, const Tensor<T> &x, Mode mode)
    {
        if (mode == Mode::eval)
            return batch_norm_eval(tape, x, gamma_, beta_, std::span<const T>(running_mean_.data()),
                                   std::span<const T>(running_var_.data()), eps_);

        BatchStats<T> stats;
        auto y = batch_norm_train(tape, x, gamma_, beta_, eps_, &stats);
        const auto count = x.size() / x.dim(1);
        const T bessel = count > 1 ? static_cast<T>(count) / static_cast<T>(count - 1) : T(1);
        auto rm = running_mean_.data();
        auto rv = running_var_.data();
        for (std::size_t c = 0; c < rm.size(); ++c)
        {
            rm[c] = momentum_ * rm[c] + (T(1) - momentum_) * stats.mean[c];
            rv[c] = momentum_ * rv[c] + (T(1) - momentum_) * stats.var[c] * bessel;
        }
        return y;
    }

    template <typename T>
    void BatchNorm<T>::collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const
    {
        params.push_back({prefix + ".gamma", gamma_});
        params.push_back({prefix + ".beta", beta_});
    }

    template <typename T>
    void BatchNorm<T>::collect_buffers(const std::string &prefix, std::vector<NamedTensor<T>> &buffers) const
    {
        buffers.push_back({prefix + ".running_mean", running_mean_});
        buffers.push_back({prefix + ".running_var", running_var_});
    }

    template <typename T>
    Dense<T>::Dense(std::size_t in_features, std::size_t out_features, std::mt19937_64 &rng)
        : weight_(glorot<T>({in_features, out_features}, in_features, out_features, rng)),
          bias_(Shape{out_features}, T(0), true)
    {
    }

    template <typename T>
    Tensor<T> Dense<T>::forward(Tape<T> &tape, const Tensor<T> &x) const
    {
        if (x.rank() != 2 || x.dim(1) != in_features())
            throw DimensionError("dense: expects [batch x " + std::to_string(in_features()) + "], got " +
                                 ad::shape_string(x.shape()));
        return ad::add(tape, ad::matmul(tape, x, weight_), bias_);
    }

    template <typename T>
    void Dense<T>::collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const
    {
        params.push_back({prefix + ".weight", weight_});
        params.push_back({prefix + ".bias", bias_});
    }

    template <typename T>
    ConvBnAct<T>::ConvBnAct(std::size_t in_channels, std::size_t out_channels, std::size_t kh, std::size_t kw,
                            T alpha, std::mt19937_64 &rng)
        : conv_(in_channels, out_channels, kh, kw, rng), bn_(out_channels), alpha_(alpha)
    {
    }

    template <typename T>
    Tensor<T> ConvBnAct<T>::forward(Tape<T> &tape, const Tensor<T> &x, Mode mode)
    {
        return lrelu(tape, bn_.forward(tape, conv_.forward(tape, x), mode), alpha_);
    }

    template <typename T>
    void ConvBnAct<T>::collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const
    {
        conv_.collect(prefix + ".conv", params);
        bn_.collect(prefix + ".bn", params);
    }

    template <typename T>
    void ConvBnAct<T>::collect_buffers(const std::string &prefix, std::vector<NamedTensor<T>> &buffers) const
    {
        bn_.collect_buffers(prefix + ".bn", buffers);
    }

    template class Conv2d<float>;
    template class Conv2d<double>;
    template class BatchNorm<float>;
    template class BatchNorm<double>;
    template class Dense<float>;
    template class Dense<double>;
    template class ConvBnAct<float>;
    template class ConvBnAct<double>;
}
