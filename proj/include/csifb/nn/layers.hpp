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

#include "csifb/nn/functional.hpp"

#include <random>
#include <string>
#include <vector>

namespace csifb::nn
{
    enum class Mode
    {
        train,
        eval
    };

    // A parameter or buffer exposed under a stable name; the tensor is a shared handle.
    template <typename T>
    struct NamedTensor
    {
        std::string name;
        Tensor<T> tensor;
    };

    /// Zero-padded 2-D convolution preserving spatial extents.
    template <typename T>
    class Conv2d
    {
    public:
        Conv2d() = default;
        // Glorot-uniform weights, zero bias.
        Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kh, std::size_t kw,
               std::mt19937_64 &rng);

        Tensor<T> forward(Tape<T> &tape, const Tensor<T> &x) const;

        std::size_t in_channels() const { return weight_.dim(1); }
        std::size_t out_channels() const { return weight_.dim(0); }
        const Tensor<T> &weight() const { return weight_; }
        const Tensor<T> &bias() const { return bias_; }

        void collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const;

    private:
        Tensor<T> weight_;
        Tensor<T> bias_;
    };

    /// Per-channel batch normalization with running statistics for eval mode.
    template <typename T>
    class BatchNorm
    {
    public:
        BatchNorm() = default;
        explicit BatchNorm(std::size_t channels, T momentum = T(0.9), T eps = T(1e-5));

        // Train mode normalizes with batch statistics and folds them into the running
        // estimates: running = momentum * running + (1 - momentum) * batch.
        Tensor<T> forward(Tape<T> &tape, const Tensor<T> &x, Mode mode);

        const Tensor<T> &gamma() const { return gamma_; }
        const Tensor<T> &beta() const { return beta_; }
        const Tensor<T> &running_mean() const { return running_mean_; }
        const Tensor<T> &running_var() const { return running_var_; }
        T eps() const { return eps_; }

        void collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const;
        void collect_buffers(const std::string &prefix, std::vector<NamedTensor<T>> &buffers) const;

    private:
        Tensor<T> gamma_, beta_;
        Tensor<T> running_mean_, running_var_;
        T momentum_ = T(0.9);
        T eps_ = T(1e-5);
    };

    /// Fully connected layer y = x W + b over [batch x features].
    template <typename T>
    class Dense
    {
    public:
        Dense() = default;
        Dense(std::size_t in_features, std::size_t out_features, std::mt19937_64 &rng);

        Tensor<T> forward(Tape<T> &tape, const Tensor<T> &x) const;

        std::size_t in_features() const { return weight_.dim(0); }
        std::size_t out_features() const { return weight_.dim(1); }

        void collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const;

    private:
        Tensor<T> weight_;
        Tensor<T> bias_;
    };

    /// conv -> batch norm -> LReLU, the unit every convolution in the model uses.
    template <typename T>
    class ConvBnAct
    {
    public:
        ConvBnAct() = default;
        ConvBnAct(std::size_t in_channels, std::size_t out_channels, std::size_t kh, std::size_t kw, T alpha,
                  std::mt19937_64 &rng);

        Tensor<T> forward(Tape<T> &tape, const Tensor<T> &x, Mode mode);

        const Conv2d<T> &conv() const { return conv_; }
        void collect(const std::string &prefix, std::vector<NamedTensor<T>> &params) const;
        void collect_buffers(const std::string &prefix, std::vector<NamedTensor<T>> &buffers) const;

    private:
        Conv2d<T> conv_;
        BatchNorm<T> bn_;
        T alpha_ = T(0.3);
    };
}
