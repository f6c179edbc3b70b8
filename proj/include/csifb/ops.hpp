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

#include <span>

// Differentiable structural and arithmetic primitives. Every op records its
// backward rule on the tape when any input requires a gradient.
namespace csifb::ad
{
    // [m x k] . [k x n]
    template <typename T>
    Tensor<T> matmul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

    // Elementwise sum. b may also match only the trailing axes of a, in which
    // case it is repeated over the leading batch axis.
    template <typename T>
    Tensor<T> add(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

    template <typename T>
    Tensor<T> sub(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

    template <typename T>
    Tensor<T> mul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

    template <typename T>
    Tensor<T> scale(Tape<T> &tape, const Tensor<T> &a, T factor);

    // All parts must agree on every axis except `axis`.
    template <typename T>
    Tensor<T> concat(Tape<T> &tape, std::span<const Tensor<T>> parts, std::size_t axis);

    // Half-open range [begin, end) along `axis`.
    template <typename T>
    Tensor<T> slice(Tape<T> &tape, const Tensor<T> &a, std::size_t axis, std::size_t begin, std::size_t end);

    template <typename T>
    Tensor<T> reshape(Tape<T> &tape, const Tensor<T> &a, Shape shape);

    // 2-D transpose.
    template <typename T>
    Tensor<T> transpose(Tape<T> &tape, const Tensor<T> &a);

    // Reductions over all elements, returning shape [1].
    template <typename T>
    Tensor<T> sum(Tape<T> &tape, const Tensor<T> &a);

    template <typename T>
    Tensor<T> mean(Tape<T> &tape, const Tensor<T> &a);
}
