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

#include "csifb/model/polardensenet.hpp"

#include "csifb/error.hpp"
#include "csifb/nn/functional.hpp"
#include "csifb/ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace csifb::model
{
    int PolarDenseNetConfig::resolved_latent_dim() const
    {
        return latent_dim > 0 ? latent_dim : static_cast<int>(std::lround(z() * gamma));
    }

    int PolarDenseNetConfig::feedback_bits() const
    {
        return resolved_latent_dim() * static_cast<int>(beta);
    }

    void PolarDenseNetConfig::validate() const
    {
        if (n < 2 || n % 2 != 0)
            throw ConfigError("polardensenet: N must be even and >= 2");
        if (k < 1)
            throw ConfigError("polardensenet: K must be >= 1");
        if (!(gamma > 0.0) && latent_dim <= 0)
            throw ConfigError("polardensenet: gamma must be positive");
        if (resolved_latent_dim() < 1)
            throw ConfigError("polardensenet: latent dimension must be >= 1");
        if (beta < 1 || beta > 16)
            throw ConfigError("polardensenet: beta must lie in [1, 16]");
        if (path_channels < 1 || dense_block_layers < 1 || growth_channels < 1 || decoder_blocks < 1 ||
            dense_kernel < 1)
            throw ConfigError("polardensenet: layer widths and counts must be positive");
    }

    std::string PolarDenseNetConfig::describe() const
    {
        std::ostringstream os;
        os << "polardensenet n=" << n << " k=" << k << " latent=" << resolved_latent_dim() << " beta=" << beta
           << " paths=" << path_channels << " dense_layers=" << dense_block_layers << " growth=" << growth_channels
           << " decoder_blocks=" << decoder_blocks << " kernel=" << dense_kernel << " alpha=" << alpha
           << " shared=" << shared_paths << " quantize=" << quantize;
        return os.str();
    }

    PolarDenseNetConfig PolarDenseNetConfig::preset(int inverse_gamma)
    {
        PolarDenseNetConfig c;
        c.gamma = 1.0 / inverse_gamma;
        switch (inverse_gamma)
        {
        case 8:
        case 16:
            break;
        case 20:
            c.latent_dim = 40;
            break;
        default:
            throw ConfigError("polardensenet: no preset for gamma=1/" + std::to_string(inverse_gamma));
        }
        return c;
    }

    std::vector<std::uint8_t> LatentCode::pack() const
    {
        std::vector<std::uint8_t> out((bit_length() + 7) / 8, 0);
        std::size_t bit = 0;
        for (auto level : levels)
            for (int b = static_cast<int>(beta) - 1; b >= 0; --b, ++bit)
                if ((level >> b) & 1u)
                    out[bit / 8] |= static_cast<std::uint8_t>(0x80u >> (bit % 8));
        return out;
    }

    LatentCode LatentCode::unpack(std::span<const std::uint8_t> bytes, std::size_t count, unsigned beta, double gamma)
    {
        if (bytes.size() * 8 < count * beta)
            throw FormatError("latent code: bitstream shorter than " + std::to_string(count * beta) + " bits");
        LatentCode code{{}, gamma, beta};
        std::size_t bit = 0;
        for (std::size_t i = 0; i < count; ++i)
        {
            std::uint32_t level = 0;
            for (unsigned b = 0; b < beta; ++b, ++bit)
                level = (level << 1) | ((bytes[bit / 8] >> (7 - bit % 8)) & 1u);
            code.levels.push_back(level);
        }
        return code;
    }

    LatentCode quantize(std::span<const double> latent, unsigned beta, double gamma)
    {
        if (beta < 1 || beta > 16)
            throw ConfigError("quantize: beta must lie in [1, 16]");
        const double top = static_cast<double>((1u << beta) - 1u);
        LatentCode code{{}, gamma, beta};
        code.levels.reserve(latent.size());
        for (double x : latent)
            code.levels.push_back(static_cast<std::uint32_t>(std::floor(std::clamp(x, 0.0, 1.0) * top + 0.5)));
        return code;
    }

    std::vector<double> dequantize(const LatentCode &code)
    {
        const double top = static_cast<double>((1u << code.beta) - 1u);
        std::vector<double> out;
        out.reserve(code.levels.size());
        for (auto level : code.levels)
        {
            if (level > static_cast<std::uint32_t>(top))
                throw FormatError("latent code: level out of range");
            out.push_back(level / top);
        }
        return out;
    }

    template <typename T>
    DenseBlock<T>::DenseBlock(std::size_t in_channels, int layers, int growth, int kernel, T alpha,
                              std::mt19937_64 &rng)
    {
        auto channels = in_channels;
        for (int i = 0; i < layers; ++i)
        {
            layers_.emplace_back(channels, static_cast<std::size_t>(growth), static_cast<std::size_t>(kernel),
                                 static_cast<std::size_t>(kernel), alpha, rng);
            channels += static_cast<std::size_t>(growth);
        }
        out_channels_ = channels;
    }

    template <typename T>
    Tensor<T> DenseBlock<T>::forward(Tape<T> &tape, const Tensor<T> &x, Mode mode)
    {
        std::vector<Tensor<T>> features{x};
        Tensor<T> stacked = x;
        for (auto &layer : layers_)
        {
            features.push_back(layer.forward(tape, stacked, mode));
            stacked = ad::concat<T>(tape, features, 1);
        }
        return stacked;
    }

    template <typename T>
    void DenseBlock<T>::collect(const std::string &prefix, std::vector<nn::NamedTensor<T>> &params) const
    {
        for (std::size_t i = 0; i < layers_.size(); ++i)
            layers_[i].collect(prefix + ".layer" + std::to_string(i), params);
    }

    template <typename T>
    void DenseBlock<T>::collect_buffers(const std::string &prefix, std::vector<nn::NamedTensor<T>> &buffers) const
    {
        for (std::size_t i = 0; i < layers_.size(); ++i)
            layers_[i].collect_buffers(prefix + ".layer" + std::to_string(i), buffers);
    }

    template <typename T>
    PolarDenseNet<T>::PolarDenseNet(const PolarDenseNetConfig &config, std::uint64_t seed) : config_(config)
    {
        config_.validate();
        latent_dim_ = config_.resolved_latent_dim();
        std::mt19937_64 rng(seed);
        const auto p = static_cast<std::size_t>(config_.path_channels);
        const T alpha = static_cast<T>(config_.alpha);
        const auto half = static_cast<std::size_t>(config_.n / 2);
        const auto k = static_cast<std::size_t>(config_.k);

        upper_ = {nn::ConvBnAct<T>(2, p, 8, 1, alpha, rng), nn::ConvBnAct<T>(p, p, 1, 8, alpha, rng)};
        if (!config_.shared_paths)
            lower_ = {nn::ConvBnAct<T>(2, p, 8, 1, alpha, rng), nn::ConvBnAct<T>(p, p, 1, 8, alpha, rng)};

        encoder_block_ = DenseBlock<T>(2 * p, config_.dense_block_layers, config_.growth_channels,
                                       config_.dense_kernel, alpha, rng);
        encoder_dense_ = nn::Dense<T>(encoder_block_.out_channels() * half * k, static_cast<std::size_t>(latent_dim_), rng);

        decoder_dense_ = nn::Dense<T>(static_cast<std::size_t>(latent_dim_), 2 * p * half * k, rng);
        for (int b = 0; b < config_.decoder_blocks; ++b)
        {
            decoder_blocks_.emplace_back(2 * p, config_.dense_block_layers, config_.growth_channels,
                                         config_.dense_kernel, alpha, rng);
            transitions_.emplace_back(decoder_blocks_.back().out_channels(), 2 * p, 1, 1, alpha, rng);
        }
        output_conv_ = nn::Conv2d<T>(2 * p, 4, static_cast<std::size_t>(config_.dense_kernel),
                                     static_cast<std::size_t>(config_.dense_kernel), rng);
    }

    template <typename T>
    Tensor<T> PolarDenseNet<T>::run_path(Tape<T> &tape, Path &path, const Tensor<T> &x, Mode mode)
    {
        return path.frequency.forward(tape, path.spatial.forward(tape, x, mode), mode);
    }

    template <typename T>
    Tensor<T> PolarDenseNet<T>::path_features(Tape<T> &tape, const Tensor<T> &x, Mode mode)
    {
        if (x.rank() != 4 || x.dim(1) != 2 || x.dim(2) != static_cast<std::size_t>(config_.n) ||
            x.dim(3) != static_cast<std::size_t>(config_.k))
            throw DimensionError("polardensenet: input " + ad::shape_string(x.shape()) + " does not match [B x 2 x " +
                                 std::to_string(config_.n) + " x " + std::to_string(config_.k) + "]");
        const auto half = static_cast<std::size_t>(config_.n / 2);
        auto top = ad::slice(tape, x, 2, 0, half);
        auto bottom = ad::slice(tape, x, 2, half, 2 * half);
        std::vector<Tensor<T>> parts{run_path(tape, upper_, top, mode),
                                     run_path(tape, config_.shared_paths ? upper_ : lower_, bottom, mode)};
        return ad::concat<T>(tape, parts, 1);
    }

    template <typename T>
    Tensor<T> PolarDenseNet<T>::encode(Tape<T> &tape, const Tensor<T> &x, Mode mode)
    {
        auto features = encoder_block_.forward(tape, path_features(tape, x, mode), mode);
        const auto batch = features.dim(0);
        auto flat = ad::reshape(tape, features, {batch, features.size() / batch});
        return nn::sigmoid(tape, encoder_dense_.forward(tape, flat));
    }

    template <typename T>
    Tensor<T> PolarDenseNet<T>::decode(Tape<T> &tape, const Tensor<T> &latent, Mode mode)
    {
        if (latent.rank() != 2 || latent.dim(1) != static_cast<std::size_t>(latent_dim_))
            throw DimensionError("polardensenet: latent " + ad::shape_string(latent.shape()) + " does not match [B x " +
                                 std::to_string(latent_dim_) + "]");
        const auto batch = latent.dim(0);
        const auto p = static_cast<std::size_t>(config_.path_channels);
        const auto half = static_cast<std::size_t>(config_.n / 2);
        const auto k = static_cast<std::size_t>(config_.k);

        auto x = ad::reshape(tape, decoder_dense_.forward(tape, latent), {batch, 2 * p, half, k});
        for (std::size_t b = 0; b < decoder_blocks_.size(); ++b)
            x = transitions_[b].forward(tape, decoder_blocks_[b].forward(tape, x, mode), mode);
        auto out = output_conv_.forward(tape, x);

        std::vector<Tensor<T>> halves{ad::slice(tape, out, 1, 0, 2), ad::slice(tape, out, 1, 2, 4)};
        return nn::normalize_columns(tape, ad::concat<T>(tape, halves, 2));
    }

    template <typename T>
    Tensor<T> PolarDenseNet<T>::forward(Tape<T> &tape, const Tensor<T> &x, Mode mode)
    {
        auto z = encode(tape, x, mode);
        if (config_.quantize)
            z = nn::quantize_ste(tape, z, config_.beta);
        return decode(tape, z, mode);
    }

    template <typename T>
    std::vector<nn::NamedTensor<T>> PolarDenseNet<T>::parameters() const
    {
        std::vector<nn::NamedTensor<T>> params;
        upper_.spatial.collect("enc.path0.spatial", params);
        upper_.frequency.collect("enc.path0.frequency", params);
        if (!config_.shared_paths)
        {
            lower_.spatial.collect("enc.path1.spatial", params);
            lower_.frequency.collect("enc.path1.frequency", params);
        }
        encoder_block_.collect("enc.dense_block", params);
        encoder_dense_.collect("enc.dense", params);
        decoder_dense_.collect("dec.dense", params);
        for (std::size_t b = 0; b < decoder_blocks_.size(); ++b)
        {
            decoder_blocks_[b].collect("dec.block" + std::to_string(b), params);
            transitions_[b].collect("dec.transition" + std::to_string(b), params);
        }
        output_conv_.collect("dec.output", params);
        return params;
    }

    template <typename T>
    std::vector<nn::NamedTensor<T>> PolarDenseNet<T>::buffers() const
    {
        std::vector<nn::NamedTensor<T>> buffers;
        upper_.spatial.collect_buffers("enc.path0.spatial", buffers);
        upper_.frequency.collect_buffers("enc.path0.frequency", buffers);
        if (!config_.shared_paths)
        {
            lower_.spatial.collect_buffers("enc.path1.spatial", buffers);
            lower_.frequency.collect_buffers("enc.path1.frequency", buffers);
        }
        encoder_block_.collect_buffers("enc.dense_block", buffers);
        for (std::size_t b = 0; b < decoder_blocks_.size(); ++b)
        {
            decoder_blocks_[b].collect_buffers("dec.block" + std::to_string(b), buffers);
            transitions_[b].collect_buffers("dec.transition" + std::to_string(b), buffers);
        }
        return buffers;
    }

    template <typename T>
    std::vector<Tensor<T>> PolarDenseNet<T>::parameter_tensors() const
    {
        std::vector<Tensor<T>> out;
        for (auto &p : parameters())
            out.push_back(p.tensor);
        return out;
    }

    template <typename T>
    std::uint64_t PolarDenseNet<T>::arch_hash() const
    {
        std::string text = config_.describe();
        for (const auto &p : parameters())
            text += "|" + p.name + ad::shape_string(p.tensor.shape());
        return nn::fnv1a(text);
    }

    namespace
    {
        constexpr const char *kArchitectureBlock = "meta.architecture";
    }

    template <typename T>
    void PolarDenseNet<T>::save(const std::filesystem::path &path) const
    {
        auto tensors = parameters();
        for (auto &b : buffers())
            tensors.push_back(b);
        std::vector<T> arch{static_cast<T>(latent_dim_),
                            static_cast<T>(config_.path_channels),
                            static_cast<T>(config_.dense_block_layers),
                            static_cast<T>(config_.growth_channels),
                            static_cast<T>(config_.decoder_blocks),
                            static_cast<T>(config_.dense_kernel),
                            static_cast<T>(config_.alpha),
                            static_cast<T>(config_.shared_paths ? 1 : 0),
                            static_cast<T>(config_.quantize ? 1 : 0)};
        tensors.push_back({kArchitectureBlock, Tensor<T>({arch.size()}, arch)});
        nn::CheckpointHeader header{arch_hash(), config_.gamma, config_.beta, static_cast<std::uint32_t>(config_.n),
                                    static_cast<std::uint32_t>(config_.k)};
        nn::write_checkpoint(path, header, tensors);
    }

    template <typename T>
    PolarDenseNet<T> PolarDenseNet<T>::load(const std::filesystem::path &path)
    {
        const auto ckpt = nn::read_checkpoint(path);
        const auto *arch = ckpt.find(kArchitectureBlock);
        if (!arch || arch->values.size() != 9)
            throw FormatError("checkpoint " + path.string() + " lacks the architecture block");
        PolarDenseNetConfig cfg;
        cfg.n = static_cast<int>(ckpt.header.n);
        cfg.k = static_cast<int>(ckpt.header.k);
        cfg.gamma = ckpt.header.gamma;
        cfg.beta = ckpt.header.beta;
        cfg.latent_dim = static_cast<int>(arch->values[0]);
        cfg.path_channels = static_cast<int>(arch->values[1]);
        cfg.dense_block_layers = static_cast<int>(arch->values[2]);
        cfg.growth_channels = static_cast<int>(arch->values[3]);
        cfg.decoder_blocks = static_cast<int>(arch->values[4]);
        cfg.dense_kernel = static_cast<int>(arch->values[5]);
        // alpha travels as f32; recover the decimal it was written from.
        cfg.alpha = std::round(static_cast<double>(arch->values[6]) * 1e6) / 1e6;
        cfg.shared_paths = arch->values[7] != 0.0f;
        cfg.quantize = arch->values[8] != 0.0f;

        PolarDenseNet model(cfg, 0);
        if (model.arch_hash() != ckpt.header.arch_hash)
            throw FormatError("checkpoint " + path.string() + " architecture hash mismatch");
        nn::load_tensors(ckpt, model.parameters());
        nn::load_tensors(ckpt, model.buffers());
        return model;
    }

    template <typename T>
    Tensor<T> to_tensor(std::span<const channel::CMatrix> samples)
    {
        if (samples.empty())
            throw DimensionError("to_tensor: no samples");
        const auto n = static_cast<std::size_t>(samples.front().rows());
        const auto k = static_cast<std::size_t>(samples.front().cols());
        Tensor<T> out({samples.size(), 2, n, k});
        auto d = out.data();
        const auto plane = n * k;
        for (std::size_t b = 0; b < samples.size(); ++b)
        {
            const auto &h = samples[b];
            if (static_cast<std::size_t>(h.rows()) != n || static_cast<std::size_t>(h.cols()) != k)
                throw DimensionError("to_tensor: samples disagree on (N, K)");
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < k; ++c)
                {
                    const auto v = h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                    d[(2 * b) * plane + r * k + c] = static_cast<T>(v.real());
                    d[(2 * b + 1) * plane + r * k + c] = static_cast<T>(v.imag());
                }
        }
        return out;
    }

    template <typename T>
    Tensor<T> to_tensor(std::span<const PrecoderChannelMatrix> samples)
    {
        std::vector<channel::CMatrix> mats;
        mats.reserve(samples.size());
        for (const auto &s : samples)
            mats.push_back(s.matrix());
        return to_tensor<T>(std::span<const channel::CMatrix>(mats));
    }

    template <typename T>
    std::vector<PrecoderChannelMatrix> from_tensor(const Tensor<T> &x)
    {
        if (x.rank() != 4 || x.dim(1) != 2)
            throw DimensionError("from_tensor: expects [B x 2 x N x K], got " + ad::shape_string(x.shape()));
        const auto n = x.dim(2), k = x.dim(3), plane = n * k;
        std::vector<PrecoderChannelMatrix> out;
        for (std::size_t b = 0; b < x.dim(0); ++b)
        {
            channel::CMatrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < k; ++c)
                    h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        channel::cdouble(x[(2 * b) * plane + r * k + c], x[(2 * b + 1) * plane + r * k + c]);
            out.push_back(PrecoderChannelMatrix::wrap(std::move(h)));
        }
        return out;
    }

    template <typename T>
    std::vector<double> encode_sample(PolarDenseNet<T> &model, const PrecoderChannelMatrix &h)
    {
        if (h.n() != model.config().n || h.k() != model.config().k)
            throw DimensionError("encode: H is " + std::to_string(h.n()) + "x" + std::to_string(h.k()) +
                                 ", model expects " + std::to_string(model.config().n) + "x" +
                                 std::to_string(model.config().k));
        Tape<T> tape(Tape<T>::Mode::inference);
        const auto z = model.encode(tape, to_tensor<T>(std::span(&h, 1)), Mode::eval);
        return std::vector<double>(z.data().begin(), z.data().end());
    }

    template <typename T>
    PrecoderChannelMatrix decode_code(PolarDenseNet<T> &model, const LatentCode &code)
    {
        if (code.levels.size() != static_cast<std::size_t>(model.latent_dim()))
            throw DimensionError("decode: code has " + std::to_string(code.levels.size()) + " values, model expects " +
                                 std::to_string(model.latent_dim()));
        const auto values = dequantize(code);
        Tensor<T> z({1, values.size()});
        std::transform(values.begin(), values.end(), z.data().begin(), [](double v) { return static_cast<T>(v); });
        Tape<T> tape(Tape<T>::Mode::inference);
        return from_tensor(model.decode(tape, z, Mode::eval)).front();
    }

    template <typename T>
    std::vector<PrecoderChannelMatrix> reconstruct(PolarDenseNet<T> &model, std::span<const channel::CMatrix> inputs,
                                                   std::size_t chunk)
    {
        std::vector<PrecoderChannelMatrix> out;
        out.reserve(inputs.size());
        for (std::size_t start = 0; start < inputs.size(); start += chunk)
        {
            const auto count = std::min(chunk, inputs.size() - start);
            Tape<T> tape(Tape<T>::Mode::inference);
            auto y = model.forward(tape, to_tensor<T>(inputs.subspan(start, count)), Mode::eval);
            for (auto &h : from_tensor(y))
                out.push_back(std::move(h));
        }
        return out;
    }

    template <typename T>
    std::vector<PrecoderChannelMatrix> reconstruct(PolarDenseNet<T> &model,
                                                   std::span<const PrecoderChannelMatrix> inputs, std::size_t chunk)
    {
        std::vector<channel::CMatrix> mats;
        mats.reserve(inputs.size());
        for (const auto &s : inputs)
            mats.push_back(s.matrix());
        return reconstruct(model, std::span<const channel::CMatrix>(mats), chunk);
    }

    template class DenseBlock<float>;
    template class DenseBlock<double>;
    template class PolarDenseNet<float>;
    template class PolarDenseNet<double>;

#define CSIFB_INSTANTIATE_MODEL(T)                                                                               \
    template Tensor<T> to_tensor<T>(std::span<const PrecoderChannelMatrix>);                                     \
    template Tensor<T> to_tensor<T>(std::span<const channel::CMatrix>);                                          \
    template std::vector<PrecoderChannelMatrix> from_tensor<T>(const Tensor<T> &);                               \
    template std::vector<double> encode_sample<T>(PolarDenseNet<T> &, const PrecoderChannelMatrix &);            \
    template PrecoderChannelMatrix decode_code<T>(PolarDenseNet<T> &, const LatentCode &);                       \
    template std::vector<PrecoderChannelMatrix> reconstruct<T>(PolarDenseNet<T> &,                               \
                                                               std::span<const channel::CMatrix>, std::size_t);  \
    template std::vector<PrecoderChannelMatrix> reconstruct<T>(PolarDenseNet<T> &,                               \
                                                               std::span<const PrecoderChannelMatrix>, std::size_t);

    CSIFB_INSTANTIATE_MODEL(float)
    CSIFB_INSTANTIATE_MODEL(double)
#undef CSIFB_INSTANTIATE_MODEL
}
