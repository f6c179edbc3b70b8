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

#include "csifb/tensor.hpp"

#include <cstddef>

// Differentiable neural-network primitives over [batch x channels x H x W] tensors.
namespace csifb::nn
{
    using ad::Shape;
    using ad::Tape;
    using ad::Tensor;

    /// Zero-padded cross-correlation that keeps H and W. Even kernels put the
    /// extra padding row/column after the data (bottom/right).
    /// x: [B x C x H x W], weight: [O x C x kh x kw], bias: [O].
    template <typename T>
    Tensor<T> conv2d(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &weight, const Tensor<T> &bias);

    template <typename T>
    struct BatchStats
    {
        std::vector<T> mean;
        std::vector<T> var; // biased (population) variance of the batch
    };

    /// Normalizes each channel (axis 1) over batch and spatial axes with the batch's
    /// own statistics, then applies y = gamma * xhat + beta.
    template <typename T>
    Tensor<T> batch_norm_train(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &gamma, const Tensor<T> &beta,
                               T eps, BatchStats<T> *stats = nullptr);

    /// Affine map using frozen statistics.
    template <typename T>
    Tensor<T> batch_norm_eval(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &gamma, const Tensor<T> &beta,
                              std::span<const T> running_mean, std::span<const T> running_var, T eps);

    // x for x >= 0, alpha * x otherwise. The derivative at 0 is taken as 1.
    template <typename T>
    Tensor<T> lrelu(Tape<T> &tape, const Tensor<T> &x, T alpha = T(0.3));

    template <typename T>
    Tensor<T> sigmoid(Tape<T> &tape, const Tensor<T> &x);

    /// Mean over the leading (batch) axis of the per-sample squared Frobenius distance.
    template <typename T>
    Tensor<T> mse_loss(Tape<T> &tape, const Tensor<T> &pred, const Tensor<T> &target);

    /// Uniform quantizer on [0, 1] with 2^bits levels; gradient passes straight through.
    template <typename T>
    Tensor<T> quantize_ste(Tape<T> &tape, const Tensor<T> &x, unsigned bits);

    /// x: [B x 2 x N x K] holding real and imaginary planes. Scales every complex
    /// column (fixed b, k) to unit Euclidean norm.
    template <typename T>
    Tensor<T> normalize_columns(Tape<T> &tape, const Tensor<T> &x);
}
