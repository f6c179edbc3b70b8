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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csifb::ad
{
    using Shape = std::vector<std::size_t>;

    std::size_t shape_size(const Shape &shape);
    std::string shape_string(const Shape &shape);

    /// Dense row-major array of reals with an optional gradient buffer.
    ///
    /// A Tensor is a handle: copies share storage, so an op output recorded on a
    /// tape and the caller's copy see the same gradient. Use clone() for a deep copy.
    template <typename T>
    class Tensor
    {
    public:
        using value_type = T;

        Tensor();
        explicit Tensor(Shape shape, T fill = T(0), bool requires_grad = false);
        Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);

        bool defined() const { return impl_ != nullptr; }
        const Shape &shape() const;
        std::size_t rank() const { return shape().size(); }
        std::size_t dim(std::size_t axis) const;
        std::size_t size() const;

        // Handle semantics: constness of the handle does not extend to the storage.
        std::span<T> data() const;
        // Unchecked element access.
        T &operator[](std::size_t i) const { return impl_->data[i]; }

        // Value of a one-element tensor.
        T item() const;

        bool requires_grad() const;
        void set_requires_grad(bool flag) const;

        bool has_grad() const;
        std::span<T> grad() const;
        // Allocates a zero gradient buffer when absent.
        std::span<T> ensure_grad() const;
        void zero_grad() const;
        void clear_grad() const;

        Tensor clone() const;
        // Deep copy without gradient tracking.
        Tensor detach() const;

        bool same_storage(const Tensor &other) const { return impl_ == other.impl_; }

    private:
        struct Impl
        {
            Shape shape;
            std::vector<T> data;
            std::vector<T> grad;
            bool has_grad = false;
            bool requires_grad = false;
        };
        std::shared_ptr<Impl> impl_;
    };

    /// Ordered record of primitive operations for reverse-mode differentiation.
    ///
    /// Entries are appended as ops execute, so every entry's inputs were produced
    /// earlier (or are leaves). backward() walks the entries once in reverse.
    /// A tape in inference mode records nothing and marks outputs as constants.
    template <typename T>
    class Tape
    {
    public:
        enum class Mode
        {
            record,
            inference
        };

        struct Entry
        {
            std::string op;
            std::vector<Tensor<T>> inputs;
            Tensor<T> output;
            std::function<void()> backward;
        };

        explicit Tape(Mode mode = Mode::record) : mode_(mode) {}

        bool recording() const { return mode_ == Mode::record; }

        // True when an op over these inputs has to be recorded.
        bool needs_grad(std::initializer_list<const Tensor<T> *> inputs) const;

        void record(std::string_view op, std::vector<Tensor<T>> inputs, Tensor<T> output,
                    std::function<void()> backward);

        /// Seeds d(loss)/d(loss) = 1 and propagates to every recorded input.
        /// Intermediate gradients are recomputed on each call; leaf gradients accumulate.
        void backward(const Tensor<T> &loss);

        const std::vector<Entry> &entries() const { return entries_; }
        std::size_t size() const { return entries_.size(); }
        void clear() { entries_.clear(); }

    private:
        Mode mode_;
        std::vector<Entry> entries_;
    };

    extern template class Tensor<float>;
    extern template class Tensor<double>;
    extern template class Tape<float>;
    extern template class Tape<double>;
}
