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

#include "csifb/ops.hpp"

#include "csifb/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace csifb::ad
{
    namespace
    {
        template <typename T>
        using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        template <typename T>
        using MapMat = Eigen::Map<RowMat<T>>;
        template <typename T>
        using CMapMat = Eigen::Map<const RowMat<T>>;

        void require_same(const Shape &a, const Shape &b, const char *op)
        {
            if (a != b)
                throw DimensionError(std::string(op) + ": shapes " + shape_string(a) + " and " + shape_string(b) +
                                     " differ");
        }

        void require_axis(const Shape &s, std::size_t axis, const char *op)
        {
            if (axis >= s.size())
                throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for " +
                                     shape_string(s));
        }

        // Product of extents before / after an axis.
        std::size_t outer_of(const Shape &s, std::size_t axis)
        {
            std::size_t n = 1;
            for (std::size_t i = 0; i < axis; ++i)
                n *= s[i];
            return n;
        }

        std::size_t inner_of(const Shape &s, std::size_t axis)
        {
            std::size_t n = 1;
            for (std::size_t i = axis + 1; i < s.size(); ++i)
                n *= s[i];
            return n;
        }

        // grad(dst) += src
        template <typename T>
        void accumulate(const Tensor<T> &dst, std::span<const T> src, T factor = T(1))
        {
            auto g = dst.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] += factor * src[i];
        }
    }

    template <typename T>
    Tensor<T> matmul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b)
    {
        if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
            throw DimensionError("matmul: cannot multiply " + shape_string(a.shape()) + " by " +
                                 shape_string(b.shape()));
        const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
        Tensor<T> out({m, n});
        MapMat<T>(out.data().data(), m, n).noalias() =
            CMapMat<T>(a.data().data(), m, k) * CMapMat<T>(b.data().data(), k, n);

        if (tape.needs_grad({&a, &b}))
            tape.record("matmul", {a, b}, out, [a, b, out, m, k, n]() mutable {
                CMapMat<T> dc(out.grad().data(), m, n);
                if (a.requires_grad())
                    MapMat<T>(a.ensure_grad().data(), m, k).noalias() += dc * CMapMat<T>(b.data().data(), k, n).transpose();
                if (b.requires_grad())
                    MapMat<T>(b.ensure_grad().data(), k, n).noalias() += CMapMat<T>(a.data().data(), m, k).transpose() * dc;
            });
        return out;
    }

    template <typename T>
    Tensor<T> add(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b)
    {
        const auto &sa = a.shape();
        const auto &sb = b.shape();
        bool broadcast = false;
        if (sa != sb)
        {
            Shape trailing(sa.begin() + 1, sa.end());
            if (sa.size() < 2 || trailing != sb)
                throw DimensionError("add: shapes " + shape_string(sa) + " and " + shape_string(sb) +
                                     " are not compatible");
            broadcast = true;
        }
        Tensor<T> out(sa);
        auto o = out.data();
        auto x = a.data();
        auto y = b.data();
        const auto period = y.size();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = x[i] + y[i % period];

        if (tape.needs_grad({&a, &b}))
            tape.record("add", {a, b}, out, [a, b, out, broadcast]() mutable {
                auto g = out.grad();
                if (a.requires_grad())
                    accumulate<T>(a, g);
                if (b.requires_grad())
                {
                    auto gb = b.ensure_grad();
                    if (!broadcast)
                        accumulate<T>(b, g);
                    else
                        for (std::size_t i = 0; i < g.size(); ++i)
                            gb[i % gb.size()] += g[i];
                }
            });
        return out;
    }

    template <typename T>
    Tensor<T> sub(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b)
    {
        require_same(a.shape(), b.shape(), "sub");
        Tensor<T> out(a.shape());
        auto o = out.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = a[i] - b[i];
        if (tape.needs_grad({&a, &b}))
            tape.record("sub", {a, b}, out, [a, b, out]() mutable {
                if (a.requires_grad())
                    accumulate<T>(a, out.grad());
                if (b.requires_grad())
                    accumulate<T>(b, out.grad(), T(-1));
            });
        return out;
    }

    template <typename T>
    Tensor<T> mul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b)
    {
        require_same(a.shape(), b.shape(), "mul");
        Tensor<T> out(a.shape());
        auto o = out.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = a[i] * b[i];
        if (tape.needs_grad({&a, &b}))
            tape.record("mul", {a, b}, out, [a, b, out]() mutable {
                auto g = out.grad();
                if (a.requires_grad())
                {
                    auto ga = a.ensure_grad();
                    for (std::size_t i = 0; i < g.size(); ++i)
                        ga[i] += g[i] * b[i];
                }
                if (b.requires_grad())
                {
                    auto gb = b.ensure_grad();
                    for (std::size_t i = 0; i < g.size(); ++i)
                        gb[i] += g[i] * a[i];
                }
            });
        return out;
    }

    template <typename T>
    Tensor<T> scale(Tape<T> &tape, const Tensor<T> &a, T factor)
    {
        Tensor<T> out(a.shape());
        auto o = out.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = factor * a[i];
        if (tape.needs_grad({&a}))
            tape.record("scale", {a}, out, [a, out, factor]() mutable { accumulate<T>(a, out.grad(), factor); });
        return out;
    }

    template <typename T>
    Tensor<T> concat(Tape<T> &tape, std::span<const Tensor<T>> parts, std::size_t axis)
    {
        if (parts.empty())
            throw DimensionError("concat: no inputs");
        Shape shape = parts[0].shape();
        require_axis(shape, axis, "concat");
        std::size_t total = 0;
        for (const auto &p : parts)
        {
            const auto &s = p.shape();
            bool ok = s.size() == shape.size();
            for (std::size_t i = 0; ok && i < s.size(); ++i)
                ok = i == axis || s[i] == shape[i];
            if (!ok)
                throw DimensionError("concat: " + shape_string(s) + " does not match " + shape_string(shape) +
                                     " off axis " + std::to_string(axis));
            total += s[axis];
        }
        shape[axis] = total;

        const auto outer = outer_of(shape, axis);
        const auto inner = inner_of(shape, axis);
        Tensor<T> out(shape);
        auto o = out.data();
        std::size_t offset = 0;
        for (const auto &p : parts)
        {
            const auto block = p.dim(axis) * inner;
            auto src = p.data();
            for (std::size_t r = 0; r < outer; ++r)
                std::copy_n(src.begin() + r * block, block, o.begin() + r * total * inner + offset);
            offset += block;
        }

        bool any = false;
        for (const auto &p : parts)
            any = any || p.requires_grad();
        if (any && tape.recording())
        {
            std::vector<Tensor<T>> inputs(parts.begin(), parts.end());
            tape.record("concat", inputs, out, [inputs, out, outer, inner, total]() mutable {
                auto g = out.grad();
                std::size_t offset = 0;
                for (auto &p : inputs)
                {
                    const auto block = p.size() / outer;
                    if (p.requires_grad())
                    {
                        auto gp = p.ensure_grad();
                        for (std::size_t r = 0; r < outer; ++r)
                            for (std::size_t j = 0; j < block; ++j)
                                gp[r * block + j] += g[r * total * inner + offset + j];
                    }
                    offset += block;
                }
            });
        }
        return out;
    }

    template <typename T>
    Tensor<T> slice(Tape<T> &tape, const Tensor<T> &a, std::size_t axis, std::size_t begin, std::size_t end)
    {
        Shape shape = a.shape();
        require_axis(shape, axis, "slice");
        if (begin >= end || end > shape[axis])
            throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                 ") invalid for axis of extent " + std::to_string(shape[axis]));
        const auto outer = outer_of(shape, axis);
        const auto inner = inner_of(shape, axis);
        const auto src_row = shape[axis] * inner;
        shape[axis] = end - begin;
        const auto block = shape[axis] * inner;
        Tensor<T> out(shape);
        auto o = out.data();
        auto x = a.data();
        for (std::size_t r = 0; r < outer; ++r)
            std::copy_n(x.begin() + r * src_row + begin * inner, block, o.begin() + r * block);

        if (tape.needs_grad({&a}))
            tape.record("slice", {a}, out, [a, out, outer, inner, src_row, block, begin]() mutable {
                auto g = out.grad();
                auto ga = a.ensure_grad();
                for (std::size_t r = 0; r < outer; ++r)
                    for (std::size_t j = 0; j < block; ++j)
                        ga[r * src_row + begin * inner + j] += g[r * block + j];
            });
        return out;
    }

    template <typename T>
    Tensor<T> reshape(Tape<T> &tape, const Tensor<T> &a, Shape shape)
    {
        if (shape_size(shape) != a.size())
            throw DimensionError("reshape: cannot view " + shape_string(a.shape()) + " as " + shape_string(shape));
        auto src = a.data();
        Tensor<T> out(std::move(shape), std::vector<T>(src.begin(), src.end()));
        if (tape.needs_grad({&a}))
            tape.record("reshape", {a}, out, [a, out]() mutable { accumulate<T>(a, out.grad()); });
        return out;
    }

    template <typename T>
    Tensor<T> transpose(Tape<T> &tape, const Tensor<T> &a)
    {
        if (a.rank() != 2)
            throw DimensionError("transpose: needs a 2-D tensor, got " + shape_string(a.shape()));
        const auto m = a.dim(0), n = a.dim(1);
        Tensor<T> out({n, m});
        MapMat<T>(out.data().data(), n, m) = CMapMat<T>(a.data().data(), m, n).transpose();
        if (tape.needs_grad({&a}))
            tape.record("transpose", {a}, out, [a, out, m, n]() mutable {
                MapMat<T>(a.ensure_grad().data(), m, n) += CMapMat<T>(out.grad().data(), n, m).transpose();
            });
        return out;
    }

    template <typename T>
    Tensor<T> sum(Tape<T> &tape, const Tensor<T> &a)
    {
        T total = T(0);
        for (auto v : a.data())
            total += v;
        Tensor<T> out({1}, total);
        if (tape.needs_grad({&a}))
            tape.record("sum", {a}, out, [a, out]() mutable {
                const T g = out.grad()[0];
                for (auto &v : a.ensure_grad())
                    v += g;
            });
        return out;
    }

    template <typename T>
    Tensor<T> mean(Tape<T> &tape, const Tensor<T> &a)
    {
        const T n = static_cast<T>(a.size());
        T total = T(0);
        for (auto v : a.data())
            total += v;
        Tensor<T> out({1}, total / n);
        if (tape.needs_grad({&a}))
            tape.record("mean", {a}, out, [a, out, n]() mutable {
                const T g = out.grad()[0] / n;
                for (auto &v : a.ensure_grad())
                    v += g;
            });
        return out;
    }

#define CSIFB_INSTANTIATE_OPS(T)                                                                      \
    template Tensor<T> matmul(Tape<T> &, const Tensor<T> &, const Tensor<T> &);                       \
    template Tensor<T> add(Tape<T> &, const Tensor<T> &, const Tensor<T> &);                          \
    template Tensor<T> sub(Tape<T> &, const Tensor<T> &, const Tensor<T> &);                          \
    template Tensor<T> mul(Tape<T> &, const Tensor<T> &, const Tensor<T> &);                          \
    template Tensor<T> scale(Tape<T> &, const Tensor<T> &, T);                                        \
    template Tensor<T> concat(Tape<T> &, std::span<const Tensor<T>>, std::size_t);                    \
    template Tensor<T> slice(Tape<T> &, const Tensor<T> &, std::size_t, std::size_t, std::size_t);    \
    template Tensor<T> reshape(Tape<T> &, const Tensor<T> &, Shape);                                  \
    template Tensor<T> transpose(Tape<T> &, const Tensor<T> &);                                       \
    template Tensor<T> sum(Tape<T> &, const Tensor<T> &);                                             \
    template Tensor<T> mean(Tape<T> &, const Tensor<T> &);

    CSIFB_INSTANTIATE_OPS(float)
    CSIFB_INSTANTIATE_OPS(double)
#undef CSIFB_INSTANTIATE_OPS
}
