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

#include "csifb/tensor.hpp"

#include "csifb/error.hpp"

#include <algorithm>
#include <numeric>

namespace csifb::ad
{
    std::size_t shape_size(const Shape &shape)
    {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    }

    std::string shape_string(const Shape &shape)
    {
        std::string s = "[";
        for (std::size_t i = 0; i < shape.size(); ++i)
        {
            if (i)
                s += "x";
            s += std::to_string(shape[i]);
        }
        return s + "]";
    }

    namespace
    {
        void check_extents(const Shape &shape)
        {
            if (shape.empty())
                throw DimensionError("tensor shape must have at least one axis");
            for (auto e : shape)
                if (e == 0)
                    throw DimensionError("tensor extents must be positive, got " + shape_string(shape));
        }
    }

    template <typename T>
    Tensor<T>::Tensor() = default;

    template <typename T>
    Tensor<T>::Tensor(Shape shape, T fill, bool requires_grad) : impl_(std::make_shared<Impl>())
    {
        check_extents(shape);
        impl_->data.assign(shape_size(shape), fill);
        impl_->shape = std::move(shape);
        impl_->requires_grad = requires_grad;
    }

    template <typename T>
    Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad) : impl_(std::make_shared<Impl>())
    {
        check_extents(shape);
        if (shape_size(shape) != data.size())
            throw DimensionError("tensor data length " + std::to_string(data.size()) + " does not match shape " +
                                 shape_string(shape));
        impl_->shape = std::move(shape);
        impl_->data = std::move(data);
        impl_->requires_grad = requires_grad;
    }

    template <typename T>
    const Shape &Tensor<T>::shape() const
    {
        if (!impl_)
            throw ContractError("use of an undefined tensor");
        return impl_->shape;
    }

    template <typename T>
    std::size_t Tensor<T>::dim(std::size_t axis) const
    {
        const auto &s = shape();
        if (axis >= s.size())
            throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " + shape_string(s));
        return s[axis];
    }

    template <typename T>
    std::size_t Tensor<T>::size() const
    {
        return impl_ ? impl_->data.size() : 0;
    }

    template <typename T>
    std::span<T> Tensor<T>::data() const
    {
        if (!impl_)
            throw ContractError("use of an undefined tensor");
        return impl_->data;
    }

    template <typename T>
    T Tensor<T>::item() const
    {
        if (size() != 1)
            throw ContractError("item() needs a one-element tensor, shape is " + shape_string(shape()));
        return impl_->data[0];
    }

    template <typename T>
    bool Tensor<T>::requires_grad() const
    {
        return impl_ && impl_->requires_grad;
    }

    template <typename T>
    void Tensor<T>::set_requires_grad(bool flag) const
    {
        if (!impl_)
            throw ContractError("use of an undefined tensor");
        impl_->requires_grad = flag;
    }

    template <typename T>
    bool Tensor<T>::has_grad() const
    {
        return impl_ && impl_->has_grad;
    }

    template <typename T>
    std::span<T> Tensor<T>::grad() const
    {
        if (!has_grad())
            throw ContractError("tensor " + shape_string(shape()) + " has no gradient");
        return impl_->grad;
    }

    template <typename T>
    std::span<T> Tensor<T>::ensure_grad() const
    {
        if (!impl_)
            throw ContractError("use of an undefined tensor");
        if (!impl_->has_grad)
        {
            impl_->grad.assign(impl_->data.size(), T(0));
            impl_->has_grad = true;
        }
        return impl_->grad;
    }

    template <typename T>
    void Tensor<T>::zero_grad() const
    {
        if (has_grad())
            std::fill(impl_->grad.begin(), impl_->grad.end(), T(0));
    }

    template <typename T>
    void Tensor<T>::clear_grad() const
    {
        if (impl_)
        {
            impl_->grad.clear();
            impl_->has_grad = false;
        }
    }

    template <typename T>
    Tensor<T> Tensor<T>::clone() const
    {
        Tensor out;
        if (impl_)
            out.impl_ = std::make_shared<Impl>(*impl_);
        return out;
    }

    template <typename T>
    Tensor<T> Tensor<T>::detach() const
    {
        return Tensor(shape(), std::vector<T>(impl_->data), false);
    }

    template <typename T>
    bool Tape<T>::needs_grad(std::initializer_list<const Tensor<T> *> inputs) const
    {
        if (!recording())
            return false;
        return std::any_of(inputs.begin(), inputs.end(), [](const Tensor<T> *t) { return t->requires_grad(); });
    }

    template <typename T>
    void Tape<T>::record(std::string_view op, std::vector<Tensor<T>> inputs, Tensor<T> output,
                         std::function<void()> backward)
    {
        if (!recording())
            return;
        output.set_requires_grad(true);
        entries_.push_back(Entry{std::string(op), std::move(inputs), std::move(output), std::move(backward)});
    }

    template <typename T>
    void Tape<T>::backward(const Tensor<T> &loss)
    {
        if (!loss.defined() || loss.size() != 1)
            throw ContractError("backward() needs a scalar loss, got " +
                                (loss.defined() ? shape_string(loss.shape()) : std::string("undefined")));

        auto produced = std::find_if(entries_.begin(), entries_.end(),
                                     [&](const Entry &e) { return e.output.same_storage(loss); });
        if (produced == entries_.end())
        {
            if (!loss.requires_grad())
                throw ContractError("backward() loss is not connected to the tape");
            const_cast<Tensor<T> &>(loss).ensure_grad()[0] += T(1);
            return;
        }

        // Op outputs get fresh gradients; leaves keep what they already hold.
        for (auto &e : entries_)
        {
            e.output.ensure_grad();
            e.output.zero_grad();
        }
        const_cast<Tensor<T> &>(loss).grad()[0] = T(1);

        auto last = std::distance(entries_.begin(), produced);
        for (auto i = last; i >= 0; --i)
            entries_[static_cast<std::size_t>(i)].backward();
    }

    template class Tensor<float>;
    template class Tensor<double>;
    template class Tape<float>;
    template class Tape<double>;
}
