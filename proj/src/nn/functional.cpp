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

#include "csifb/nn/functional.hpp"

#include "csifb/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace csifb::nn
{
    using ad::shape_string;

    namespace
    {
        template <typename T>
        using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        template <typename T>
        using MapMat = Eigen::Map<RowMat<T>>;
        template <typename T>
        using CMapMat = Eigen::Map<const RowMat<T>>;

        // Shifted-GEMM convolution. A chunk of samples is copied into zero-padded
        // planes of width wp laid end to end, one row per input channel. Output
        // pixel (r, c) of sample s sits at column s*plane + r*wp + c, and kernel
        // tap (i, j) reads the same layout shifted by i*wp + j. Columns with
        // c >= width or r >= height are scratch and get discarded, which keeps
        // every tap a single GEMM over the whole chunk.
        struct ConvGeometry
        {
            std::size_t batch, in_ch, out_ch, height, width, kh, kw, pad_top, pad_left;
            std::size_t hw() const { return height * width; }
            std::size_t taps() const { return kh * kw; }
            std::size_t wp() const { return width + kw - 1; }
            std::size_t plane() const { return (height + kh - 1) * wp(); }
            std::size_t reach() const { return (kh - 1) * wp() + kw - 1; }
            std::size_t offset(std::size_t t) const { return (t / kw) * wp() + t % kw; }

            // Samples per chunk; keeps the padded input around 512 KiB of floats.
            std::size_t chunk() const
            {
                const std::size_t target = std::size_t(1) << 17;
                return std::clamp<std::size_t>(target / std::max<std::size_t>(in_ch * plane(), 1), 1, batch);
            }
        };

        // Per-tap weight matrices [out_ch x in_ch] from the [out, in, kh, kw] layout.
        template <typename T>
        std::vector<RowMat<T>> split_taps(const ConvGeometry &g, std::span<const T> w)
        {
            std::vector<RowMat<T>> taps(g.taps(), RowMat<T>(g.out_ch, g.in_ch));
            for (std::size_t o = 0; o < g.out_ch; ++o)
                for (std::size_t c = 0; c < g.in_ch; ++c)
                    for (std::size_t t = 0; t < g.taps(); ++t)
                        taps[t](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c)) =
                            w[(o * g.in_ch + c) * g.taps() + t];
            return taps;
        }

        // Copies samples [b0, b0 + n) into xp, which has ld = n*plane + reach columns.
        template <typename T>
        void pad_chunk(const ConvGeometry &g, const T *x, std::size_t b0, std::size_t n, T *xp, std::size_t ld)
        {
            std::fill_n(xp, g.in_ch * ld, T(0));
            const auto wp = g.wp();
            for (std::size_t c = 0; c < g.in_ch; ++c)
                for (std::size_t s = 0; s < n; ++s)
                {
                    const T *src = x + ((b0 + s) * g.in_ch + c) * g.hw();
                    T *dst = xp + c * ld + s * g.plane() + g.pad_top * wp + g.pad_left;
                    for (std::size_t r = 0; r < g.height; ++r)
                        std::copy_n(src + r * g.width, g.width, dst + r * wp);
                }
        }

        template <typename T>
        using StridedMap = Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>>;
        template <typename T>
        using CStridedMap = Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>>;

        // Splits a tensor into [outer=batch, channels, spatial] for per-channel statistics.
        struct ChannelLayout
        {
            std::size_t batch, channels, spatial;
            std::size_t count() const { return batch * spatial; }
        };

        template <typename T>
        ChannelLayout channel_layout(const Tensor<T> &x, const Tensor<T> &gamma, const Tensor<T> &beta, const char *op)
        {
            if (x.rank() < 2)
                throw DimensionError(std::string(op) + ": input needs a channel axis, got " + shape_string(x.shape()));
            ChannelLayout l{x.dim(0), x.dim(1), x.size() / (x.dim(0) * x.dim(1))};
            if (gamma.size() != l.channels || beta.size() != l.channels)
                throw DimensionError(std::string(op) + ": affine parameters must have " + std::to_string(l.channels) +
                                     " entries");
            return l;
        }
    }

    template <typename T>
    Tensor<T> conv2d(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &weight, const Tensor<T> &bias)
    {
        if (x.rank() != 4 || weight.rank() != 4)
            throw DimensionError("conv2d: expects 4-D input and weight, got " + shape_string(x.shape()) + " and " +
                                 shape_string(weight.shape()));
        if (x.dim(1) != weight.dim(1))
            throw DimensionError("conv2d: input has " + std::to_string(x.dim(1)) + " channels, layer expects " +
                                 std::to_string(weight.dim(1)));
        if (bias.size() != weight.dim(0))
            throw DimensionError("conv2d: bias length does not match output channels");

        ConvGeometry g{x.dim(0), x.dim(1), weight.dim(0), x.dim(2), x.dim(3), weight.dim(2), weight.dim(3), 0, 0};
        g.pad_top = (g.kh - 1) / 2;
        g.pad_left = (g.kw - 1) / 2;

        Tensor<T> out({g.batch, g.out_ch, g.height, g.width});
        if (g.batch == 0 || g.hw() == 0)
            return out;
        const auto taps = split_taps<T>(g, weight.data());
        const auto plane = g.plane();
        const auto wp = g.wp();
        const auto step = g.chunk();
        std::vector<T> xp(g.in_ch * (step * plane + g.reach()));
        RowMat<T> y(g.out_ch, step * plane);
        auto o = out.data();
        for (std::size_t b0 = 0; b0 < g.batch; b0 += step)
        {
            const auto n = std::min(step, g.batch - b0);
            const auto ld = n * plane + g.reach();
            const auto cols = static_cast<Eigen::Index>(n * plane);
            pad_chunk<T>(g, x.data().data(), b0, n, xp.data(), ld);
            auto yc = y.leftCols(cols);
            for (std::size_t t = 0; t < g.taps(); ++t)
            {
                CStridedMap<T> xs(xp.data() + g.offset(t), g.in_ch, cols, Eigen::OuterStride<>(ld));
                if (t == 0)
                    yc.noalias() = taps[t] * xs;
                else
                    yc.noalias() += taps[t] * xs;
            }
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t oc = 0; oc < g.out_ch; ++oc)
                {
                    const T *src = y.data() + oc * y.cols() + s * plane;
                    T *dst = o.data() + ((b0 + s) * g.out_ch + oc) * g.hw();
                    for (std::size_t r = 0; r < g.height; ++r)
                        for (std::size_t c = 0; c < g.width; ++c)
                            dst[r * g.width + c] = src[r * wp + c] + bias[oc];
                }
        }

        // The padded input is rebuilt in backward rather than kept alive on the tape.
        if (tape.needs_grad({&x, &weight, &bias}))
            tape.record("conv2d", {x, weight, bias}, out, [x, weight, bias, out, g]() {
                auto go = out.grad();
                if (bias.requires_grad())
                {
                    auto gb = bias.ensure_grad();
                    for (std::size_t b = 0; b < g.batch; ++b)
                        for (std::size_t oc = 0; oc < g.out_ch; ++oc)
                        {
                            const T *p = go.data() + (b * g.out_ch + oc) * g.hw();
                            gb[oc] += std::accumulate(p, p + g.hw(), T(0));
                        }
                }
                const bool want_w = weight.requires_grad(), want_x = x.requires_grad();
                if (!want_w && !want_x)
                    return;

                const auto taps = split_taps<T>(g, weight.data());
                std::vector<RowMat<T>> dtaps(want_w ? g.taps() : 0, RowMat<T>::Zero(g.out_ch, g.in_ch));
                const auto plane = g.plane();
                const auto wp = g.wp();
                const auto step = g.chunk();
                std::vector<T> xp(want_w ? g.in_ch * (step * plane + g.reach()) : 0);
                std::vector<T> dxp(want_x ? g.in_ch * (step * plane + g.reach()) : 0);
                RowMat<T> dy = RowMat<T>::Zero(g.out_ch, step * plane);
                for (std::size_t b0 = 0; b0 < g.batch; b0 += step)
                {
                    const auto n = std::min(step, g.batch - b0);
                    const auto ld = n * plane + g.reach();
                    const auto cols = static_cast<Eigen::Index>(n * plane);
                    // Scratch columns stay zero so they add nothing below.
                    dy.setZero();
                    for (std::size_t s = 0; s < n; ++s)
                        for (std::size_t oc = 0; oc < g.out_ch; ++oc)
                        {
                            const T *src = go.data() + ((b0 + s) * g.out_ch + oc) * g.hw();
                            T *dst = dy.data() + oc * dy.cols() + s * plane;
                            for (std::size_t r = 0; r < g.height; ++r)
                                std::copy_n(src + r * g.width, g.width, dst + r * wp);
                        }
                    const auto dyc = dy.leftCols(cols);
                    if (want_w)
                        pad_chunk<T>(g, x.data().data(), b0, n, xp.data(), ld);
                    if (want_x)
                        std::fill_n(dxp.data(), g.in_ch * ld, T(0));
                    for (std::size_t t = 0; t < g.taps(); ++t)
                    {
                        if (want_w)
                            dtaps[t].noalias() +=
                                dyc * CStridedMap<T>(xp.data() + g.offset(t), g.in_ch, cols, Eigen::OuterStride<>(ld))
                                          .transpose();
                        if (want_x)
                            StridedMap<T>(dxp.data() + g.offset(t), g.in_ch, cols, Eigen::OuterStride<>(ld))
                                .noalias() += taps[t].transpose() * dyc;
                    }
                    if (want_x)
                    {
                        auto gx = x.ensure_grad();
                        for (std::size_t c = 0; c < g.in_ch; ++c)
                            for (std::size_t s = 0; s < n; ++s)
                            {
                                const T *src = dxp.data() + c * ld + s * plane + g.pad_top * wp + g.pad_left;
                                T *dst = gx.data() + ((b0 + s) * g.in_ch + c) * g.hw();
                                for (std::size_t r = 0; r < g.height; ++r)
                                    for (std::size_t cc = 0; cc < g.width; ++cc)
                                        dst[r * g.width + cc] += src[r * wp + cc];
                            }
                    }
                }
                if (want_w)
                {
                    auto gw = weight.ensure_grad();
                    for (std::size_t o = 0; o < g.out_ch; ++o)
                        for (std::size_t c = 0; c < g.in_ch; ++c)
                            for (std::size_t t = 0; t < g.taps(); ++t)
                                gw[(o * g.in_ch + c) * g.taps() + t] +=
                                    dtaps[t](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c));
                }
            });
        return out;
    }

    template <typename T>
    Tensor<T> batch_norm_train(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &gamma, const Tensor<T> &beta,
                               T eps, BatchStats<T> *stats)
    {
        const auto l = channel_layout(x, gamma, beta, "batch_norm");
        const T n = static_cast<T>(l.count());
        std::vector<T> mean(l.channels, T(0)), var(l.channels, T(0));
        auto xs = x.data();
        for (std::size_t b = 0; b < l.batch; ++b)
            for (std::size_t c = 0; c < l.channels; ++c)
            {
                const T *p = xs.data() + (b * l.channels + c) * l.spatial;
                for (std::size_t s = 0; s < l.spatial; ++s)
                    mean[c] += p[s];
            }
        for (auto &m : mean)
            m /= n;
        for (std::size_t b = 0; b < l.batch; ++b)
            for (std::size_t c = 0; c < l.channels; ++c)
            {
                const T *p = xs.data() + (b * l.channels + c) * l.spatial;
                for (std::size_t s = 0; s < l.spatial; ++s)
                    var[c] += (p[s] - mean[c]) * (p[s] - mean[c]);
            }
        std::vector<T> inv_std(l.channels);
        for (std::size_t c = 0; c < l.channels; ++c)
        {
            var[c] /= n;
            inv_std[c] = T(1) / std::sqrt(var[c] + eps);
        }

        auto xhat = std::make_shared<std::vector<T>>(x.size());
        Tensor<T> out(x.shape());
        auto o = out.data();
        for (std::size_t b = 0; b < l.batch; ++b)
            for (std::size_t c = 0; c < l.channels; ++c)
            {
                const auto base = (b * l.channels + c) * l.spatial;
                for (std::size_t s = 0; s < l.spatial; ++s)
                {
                    const T h = (xs[base + s] - mean[c]) * inv_std[c];
                    (*xhat)[base + s] = h;
                    o[base + s] = gamma[c] * h + beta[c];
                }
            }
        if (stats)
            *stats = BatchStats<T>{mean, var};

        if (tape.needs_grad({&x, &gamma, &beta}))
            tape.record("batch_norm", {x, gamma, beta}, out, [x, gamma, beta, out, l, xhat, inv_std, n]() mutable {
                auto go = out.grad();
                std::vector<T> sum_dy(l.channels, T(0)), sum_dy_xhat(l.channels, T(0));
                for (std::size_t b = 0; b < l.batch; ++b)
                    for (std::size_t c = 0; c < l.channels; ++c)
                    {
                        const auto base = (b * l.channels + c) * l.spatial;
                        for (std::size_t s = 0; s < l.spatial; ++s)
                        {
                            sum_dy[c] += go[base + s];
                            sum_dy_xhat[c] += go[base + s] * (*xhat)[base + s];
                        }
                    }
                if (gamma.requires_grad())
                {
                    auto gg = gamma.ensure_grad();
                    for (std::size_t c = 0; c < l.channels; ++c)
                        gg[c] += sum_dy_xhat[c];
                }
                if (beta.requires_grad())
                {
                    auto gb = beta.ensure_grad();
                    for (std::size_t c = 0; c < l.channels; ++c)
                        gb[c] += sum_dy[c];
                }
                if (x.requires_grad())
                {
                    auto gx = x.ensure_grad();
                    for (std::size_t b = 0; b < l.batch; ++b)
                        for (std::size_t c = 0; c < l.channels; ++c)
                        {
                            const auto base = (b * l.channels + c) * l.spatial;
                            const T k = gamma[c] * inv_std[c];
                            const T mdy = sum_dy[c] / n;
                            const T mdyx = sum_dy_xhat[c] / n;
                            for (std::size_t s = 0; s < l.spatial; ++s)
                                gx[base + s] += k * (go[base + s] - mdy - (*xhat)[base + s] * mdyx);
                        }
                }
            });
        return out;
    }

    template <typename T>
    Tensor<T> batch_norm_eval(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &gamma, const Tensor<T> &beta,
                              std::span<const T> running_mean, std::span<const T> running_var, T eps)
    {
        const auto l = channel_layout(x, gamma, beta, "batch_norm");
        std::vector<T> inv_std(l.channels), mean(running_mean.begin(), running_mean.end());
        for (std::size_t c = 0; c < l.channels; ++c)
            inv_std[c] = T(1) / std::sqrt(running_var[c] + eps);
        Tensor<T> out(x.shape());
        auto o = out.data();
        auto xs = x.data();
        for (std::size_t b = 0; b < l.batch; ++b)
            for (std::size_t c = 0; c < l.channels; ++c)
            {
                const auto base = (b * l.channels + c) * l.spatial;
                for (std::size_t s = 0; s < l.spatial; ++s)
                    o[base + s] = gamma[c] * (xs[base + s] - mean[c]) * inv_std[c] + beta[c];
            }

        if (tape.needs_grad({&x, &gamma, &beta}))
            tape.record("batch_norm_eval", {x, gamma, beta}, out, [x, gamma, beta, out, l, mean, inv_std]() mutable {
                auto go = out.grad();
                auto gg = gamma.requires_grad() ? gamma.ensure_grad() : std::span<T>{};
                auto gb = beta.requires_grad() ? beta.ensure_grad() : std::span<T>{};
                auto gx = x.requires_grad() ? x.ensure_grad() : std::span<T>{};
                for (std::size_t b = 0; b < l.batch; ++b)
                    for (std::size_t c = 0; c < l.channels; ++c)
                    {
                        const auto base = (b * l.channels + c) * l.spatial;
                        for (std::size_t s = 0; s < l.spatial; ++s)
                        {
                            const T g = go[base + s];
                            if (!gg.empty())
                                gg[c] += g * (x[base + s] - mean[c]) * inv_std[c];
                            if (!gb.empty())
                                gb[c] += g;
                            if (!gx.empty())
                                gx[base + s] += g * gamma[c] * inv_std[c];
                        }
                    }
            });
        return out;
    }

    template <typename T>
    Tensor<T> lrelu(Tape<T> &tape, const Tensor<T> &x, T alpha)
    {
        Tensor<T> out(x.shape());
        auto o = out.data();
        auto xs = x.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = xs[i] >= T(0) ? xs[i] : alpha * xs[i];
        if (tape.needs_grad({&x}))
            tape.record("lrelu", {x}, out, [x, out, alpha]() mutable {
                auto go = out.grad();
                auto gx = x.ensure_grad();
                for (std::size_t i = 0; i < gx.size(); ++i)
                    gx[i] += x[i] >= T(0) ? go[i] : alpha * go[i];
            });
        return out;
    }

    template <typename T>
    Tensor<T> sigmoid(Tape<T> &tape, const Tensor<T> &x)
    {
        Tensor<T> out(x.shape());
        auto o = out.data();
        auto xs = x.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = T(1) / (T(1) + std::exp(-xs[i]));
        if (tape.needs_grad({&x}))
            tape.record("sigmoid", {x}, out, [x, out]() mutable {
                auto go = out.grad();
                auto gx = x.ensure_grad();
                for (std::size_t i = 0; i < gx.size(); ++i)
                    gx[i] += go[i] * out[i] * (T(1) - out[i]);
            });
        return out;
    }

    template <typename T>
    Tensor<T> mse_loss(Tape<T> &tape, const Tensor<T> &pred, const Tensor<T> &target)
    {
        if (pred.shape() != target.shape())
            throw DimensionError("mse_loss: prediction " + shape_string(pred.shape()) + " vs target " +
                                 shape_string(target.shape()));
        const T batch = static_cast<T>(pred.dim(0));
        T total = T(0);
        for (std::size_t i = 0; i < pred.size(); ++i)
        {
            const T d = pred[i] - target[i];
            total += d * d;
        }
        Tensor<T> out({1}, total / batch);
        if (tape.needs_grad({&pred, &target}))
            tape.record("mse_loss", {pred, target}, out, [pred, target, out, batch]() mutable {
                const T k = T(2) * out.grad()[0] / batch;
                if (pred.requires_grad())
                {
                    auto g = pred.ensure_grad();
                    for (std::size_t i = 0; i < g.size(); ++i)
                        g[i] += k * (pred[i] - target[i]);
                }
                if (target.requires_grad())
                {
                    auto g = target.ensure_grad();
                    for (std::size_t i = 0; i < g.size(); ++i)
                        g[i] -= k * (pred[i] - target[i]);
                }
            });
        return out;
    }

    template <typename T>
    Tensor<T> quantize_ste(Tape<T> &tape, const Tensor<T> &x, unsigned bits)
    {
        if (bits == 0 || bits > 24)
            throw ContractError("quantize_ste: bit width must be in [1, 24]");
        const T top = static_cast<T>((1u << bits) - 1u);
        Tensor<T> out(x.shape());
        auto o = out.data();
        auto xs = x.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = std::floor(std::clamp(xs[i], T(0), T(1)) * top + T(0.5)) / top;
        if (tape.needs_grad({&x}))
            tape.record("quantize_ste", {x}, out, [x, out]() mutable {
                auto go = out.grad();
                auto gx = x.ensure_grad();
                for (std::size_t i = 0; i < gx.size(); ++i)
                    gx[i] += go[i];
            });
        return out;
    }

    template <typename T>
    Tensor<T> normalize_columns(Tape<T> &tape, const Tensor<T> &x)
    {
        if (x.rank() != 4 || x.dim(1) != 2)
            throw DimensionError("normalize_columns: expects [B x 2 x N x K], got " + shape_string(x.shape()));
        const auto batch = x.dim(0), rows = x.dim(2), cols = x.dim(3);
        const auto plane = rows * cols;
        std::vector<T> norms(batch * cols, T(0));
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t p = 0; p < 2; ++p)
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t k = 0; k < cols; ++k)
                    {
                        const T v = x[(b * 2 + p) * plane + r * cols + k];
                        norms[b * cols + k] += v * v;
                    }
        for (auto &v : norms)
        {
            v = std::sqrt(v);
            // NaN and inf pass through so a diverging caller sees a non-finite loss
            if (v == T(0))
                throw ContractError("normalize_columns: zero column");
        }
        Tensor<T> out(x.shape());
        auto o = out.data();
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t p = 0; p < 2; ++p)
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t k = 0; k < cols; ++k)
                    {
                        const auto i = (b * 2 + p) * plane + r * cols + k;
                        o[i] = x[i] / norms[b * cols + k];
                    }

        if (tape.needs_grad({&x}))
            tape.record("normalize_columns", {x}, out, [x, out, norms, batch, rows, cols, plane]() mutable {
                auto go = out.grad();
                auto gx = x.ensure_grad();
                std::vector<T> dots(batch * cols, T(0));
                for (std::size_t b = 0; b < batch; ++b)
                    for (std::size_t p = 0; p < 2; ++p)
                        for (std::size_t r = 0; r < rows; ++r)
                            for (std::size_t k = 0; k < cols; ++k)
                            {
                                const auto i = (b * 2 + p) * plane + r * cols + k;
                                dots[b * cols + k] += out[i] * go[i];
                            }
                for (std::size_t b = 0; b < batch; ++b)
                    for (std::size_t p = 0; p < 2; ++p)
                        for (std::size_t r = 0; r < rows; ++r)
                            for (std::size_t k = 0; k < cols; ++k)
                            {
                                const auto i = (b * 2 + p) * plane + r * cols + k;
                                const auto c = b * cols + k;
                                gx[i] += (go[i] - out[i] * dots[c]) / norms[c];
                            }
            });
        return out;
    }

#define CSIFB_INSTANTIATE_NN(T)                                                                                  \
    template Tensor<T> conv2d(Tape<T> &, const Tensor<T> &, const Tensor<T> &, const Tensor<T> &);               \
    template Tensor<T> batch_norm_train(Tape<T> &, const Tensor<T> &, const Tensor<T> &, const Tensor<T> &, T,   \
                                        BatchStats<T> *);                                                        \
    template Tensor<T> batch_norm_eval(Tape<T> &, const Tensor<T> &, const Tensor<T> &, const Tensor<T> &,       \
                                       std::span<const T>, std::span<const T>, T);                               \
    template Tensor<T> lrelu(Tape<T> &, const Tensor<T> &, T);                                                   \
    template Tensor<T> sigmoid(Tape<T> &, const Tensor<T> &);                                                    \
    template Tensor<T> mse_loss(Tape<T> &, const Tensor<T> &, const Tensor<T> &);                                \
    template Tensor<T> quantize_ste(Tape<T> &, const Tensor<T> &, unsigned);                                     \
    template Tensor<T> normalize_columns(Tape<T> &, const Tensor<T> &);

    CSIFB_INSTANTIATE_NN(float)
    CSIFB_INSTANTIATE_NN(double)
#undef CSIFB_INSTANTIATE_NN
}
