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

#include "csifb/channel/synth.hpp"
#include "csifb/nn/checkpoint.hpp"
#include "csifb/nn/layers.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace csifb::model
{
    using ad::Tape;
    using ad::Tensor;
    using channel::PrecoderChannelMatrix;
    using nn::Mode;

    struct PolarDenseNetConfig
    {
        int n = 32;
        int k = 13;
        double gamma = 1.0 / 8.0;  // latent size over Z = 2NK
        unsigned beta = 2;         // quantizer bits per latent value
        int latent_dim = 0;        // 0 derives round(2NK gamma)
        int path_channels = 8;
        int dense_block_layers = 3;
        int growth_channels = 8;
        int decoder_blocks = 2;
        int dense_kernel = 3;
        double alpha = 0.3;
        bool shared_paths = false; // one conv path applied to both polarizations
        bool quantize = true;      // false bypasses the quantizer entirely

        int z() const { return 2 * n * k; }
        int resolved_latent_dim() const;
        // latent_dim * beta
        int feedback_bits() const;
        void validate() const;
        // Canonical text of every architecture field; hashed into checkpoints.
        std::string describe() const;

        /// N=32, K=13 presets for gamma in {1/8, 1/16, 1/20}. The 1/20 preset pins
        /// 40 latent values (80 bits at beta=2).
        static PolarDenseNetConfig preset(int inverse_gamma);
    };

    /// Uniform quantizer output: one level in [0, 2^beta - 1] per latent value.
    struct LatentCode
    {
        std::vector<std::uint32_t> levels;
        double gamma = 0.0;
        unsigned beta = 2;

        std::size_t bit_length() const { return levels.size() * beta; }
        // Levels packed MSB-first, beta bits each.
        std::vector<std::uint8_t> pack() const;
        static LatentCode unpack(std::span<const std::uint8_t> bytes, std::size_t count, unsigned beta, double gamma);
    };

    // level = round(x (2^beta - 1)) with x clamped to [0, 1], halves rounding up.
    LatentCode quantize(std::span<const double> latent, unsigned beta, double gamma = 0.0);
    std::vector<double> dequantize(const LatentCode &code);

    /// Conv layers with dense (concatenating) connectivity. The output stacks the
    /// block input with every layer's features.
    template <typename T>
    class DenseBlock
    {
    public:
        DenseBlock() = default;
        DenseBlock(std::size_t in_channels, int layers, int growth, int kernel, T alpha, std::mt19937_64 &rng);

        Tensor<T> forward(Tape<T> &tape, const Tensor<T> &x, Mode mode);
        std::size_t out_channels() const { return out_channels_; }

        void collect(const std::string &prefix, std::vector<nn::NamedTensor<T>> &params) const;
        void collect_buffers(const std::string &prefix, std::vector<nn::NamedTensor<T>> &buffers) const;

    private:
        std::vector<nn::ConvBnAct<T>> layers_;
        std::size_t out_channels_ = 0;
    };

    /// Polarization-split convolutional autoencoder.
    ///
    /// Encoder: [B,2,N,K] -> split rows into two [B,2,N/2,K] halves -> per half
    /// conv 8x1 then conv 1x8 (each + BN + LReLU) -> concat along channels ->
    /// DenseEnBlock -> flatten -> dense -> sigmoid.
    /// Decoder: dense -> [B,2P,N/2,K] -> DenseDeBlocks (each followed by a 1x1
    /// transition back to 2P channels) -> conv to 4 channels -> channels {0,1}
    /// become the upper half, {2,3} the lower -> unit-norm columns.
    template <typename T>
    class PolarDenseNet
    {
    public:
        PolarDenseNet(const PolarDenseNetConfig &config, std::uint64_t seed);

        const PolarDenseNetConfig &config() const { return config_; }
        int latent_dim() const { return latent_dim_; }

        // Concatenated per-polarization features, [B, 2P, N/2, K].
        Tensor<T> path_features(Tape<T> &tape, const Tensor<T> &x, Mode mode);
        // [B, latent_dim] in (0, 1).
        Tensor<T> encode(Tape<T> &tape, const Tensor<T> &x, Mode mode);
        // [B, latent_dim] -> [B, 2, N, K] with unit columns.
        Tensor<T> decode(Tape<T> &tape, const Tensor<T> &latent, Mode mode);
        // decode(Q(encode(x))), Q skipped when the config disables quantization.
        Tensor<T> forward(Tape<T> &tape, const Tensor<T> &x, Mode mode);

        std::vector<nn::NamedTensor<T>> parameters() const;
        std::vector<nn::NamedTensor<T>> buffers() const;
        std::vector<Tensor<T>> parameter_tensors() const;

        std::uint64_t arch_hash() const;
        void save(const std::filesystem::path &path) const;
        // Rebuilds the architecture from the checkpoint and loads its values.
        static PolarDenseNet load(const std::filesystem::path &path);

    private:
        struct Path
        {
            nn::ConvBnAct<T> spatial;   // 8x1
            nn::ConvBnAct<T> frequency; // 1x8
        };

        Tensor<T> run_path(Tape<T> &tape, Path &path, const Tensor<T> &x, Mode mode);

        PolarDenseNetConfig config_;
        int latent_dim_ = 0;
        Path upper_, lower_;
        DenseBlock<T> encoder_block_;
        nn::Dense<T> encoder_dense_;
        nn::Dense<T> decoder_dense_;
        std::vector<DenseBlock<T>> decoder_blocks_;
        std::vector<nn::ConvBnAct<T>> transitions_;
        nn::Conv2d<T> output_conv_;
    };

    // Packs samples into [B, 2, N, K]: real plane then imaginary plane.
    template <typename T>
    Tensor<T> to_tensor(std::span<const PrecoderChannelMatrix> samples);
    template <typename T>
    Tensor<T> to_tensor(std::span<const channel::CMatrix> samples);

    template <typename T>
    std::vector<PrecoderChannelMatrix> from_tensor(const Tensor<T> &x);

    /// Single-sample encoder output as doubles (eval mode).
    template <typename T>
    std::vector<double> encode_sample(PolarDenseNet<T> &model, const PrecoderChannelMatrix &h);

    template <typename T>
    PrecoderChannelMatrix decode_code(PolarDenseNet<T> &model, const LatentCode &code);

    /// Full encode -> quantize -> decode over many samples in eval mode. Inputs may
    /// be arbitrary complex matrices (noisy observations).
    template <typename T>
    std::vector<PrecoderChannelMatrix> reconstruct(PolarDenseNet<T> &model, std::span<const channel::CMatrix> inputs,
                                                   std::size_t chunk = 256);
    template <typename T>
    std::vector<PrecoderChannelMatrix> reconstruct(PolarDenseNet<T> &model,
                                                   std::span<const PrecoderChannelMatrix> inputs,
                                                   std::size_t chunk = 256);

    extern template class PolarDenseNet<float>;
    extern template class PolarDenseNet<double>;
}
