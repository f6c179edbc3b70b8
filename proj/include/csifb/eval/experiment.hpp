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

// Config files are INI: "[section]" headers and "key = value" lines, ';' or '#'
// comments. Unknown sections and keys are rejected so typos do not go unnoticed.
// Relative paths inside a config resolve against the config file's directory.

#include "csifb/channel/synth.hpp"
#include "csifb/eval/noise.hpp"
#include "csifb/model/polardensenet.hpp"
#include "csifb/model/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace csifb::eval
{
    // ---- generate ----------------------------------------------------------

    /// [generate] count, seed
    /// [channel]  n1, n2, rbs, subband_rb, subcarriers_per_rb, subcarrier_spacing_hz,
    ///            n_rx, paths, angle_spread_deg, centre_azimuth_range_deg,
    ///            zenith_spread_deg, delay_spread_s, shadowing_db
    struct GenerateConfig
    {
        channel::ChannelConfig channel;
        std::size_t count = 5000;
        std::uint64_t seed = 1;

        static GenerateConfig load(const std::filesystem::path &path);
    };

    // Writes <out>/dataset.bin and returns its path.
    std::filesystem::path run_generate(const GenerateConfig &cfg, const std::filesystem::path &out);

    // ---- train -------------------------------------------------------------

    /// [train] dataset, train_samples, val_samples (taken right after the training
    ///         slice), epochs, batch_size, lr_max, lr_min, warmup, seed, noise ("lo-hi" dB)
    /// [model] inverse_gamma (preset) or gamma, latent_dim, beta, path_channels,
    ///         dense_block_layers, growth_channels, decoder_blocks, shared_paths, quantize
    struct TrainConfig
    {
        std::filesystem::path dataset;
        std::size_t train_samples = 4000;
        std::size_t val_samples = 1000;
        model::TrainHyper hyper;
        model::PolarDenseNetConfig model; // N and K come from the dataset

        static TrainConfig load(const std::filesystem::path &path);
    };

    struct TrainOutcome
    {
        std::filesystem::path checkpoint; // <out>/model.ckpt
        std::filesystem::path history;    // <out>/history.csv
        model::TrainingHistory training;
        model::Evaluation validation;
    };

    TrainOutcome run_train(const TrainConfig &cfg, const std::filesystem::path &out,
                           const model::EpochCallback &on_epoch = {});

    // ---- eval --------------------------------------------------------------

    enum class ArmKind
    {
        rel15,
        rel16,
        autoencoder
    };

    /// One [arm.<name>] section: scheme = rel15 | rel16 | polardensenet, then
    /// l (and m for rel16) or checkpoint.
    struct ArmSpec
    {
        std::string name;
        ArmKind kind = ArmKind::rel15;
        int l = 2;
        int m = 3;
        std::filesystem::path checkpoint;
    };

    /// [experiment] dataset, first_sample, samples (0 = to the end), heatmap_sample,
    ///              seed, noise ("0-5, 5-10"), noise_draws, n1, n2, o1, o2
    struct ExperimentConfig
    {
        std::filesystem::path dataset;
        std::size_t first_sample = 0;
        std::size_t samples = 0;
        std::size_t heatmap_sample = 0;
        std::uint64_t seed = 1;
        std::vector<NoiseSpec> noise;
        int noise_draws = 1; // independent noise realizations averaged per range
        channel::AntennaConfig antenna;
        int o1 = 4;
        int o2 = 1;
        std::vector<ArmSpec> arms;

        void validate() const;
        static ExperimentConfig load(const std::filesystem::path &path);
    };

    struct MetricsRecord
    {
        std::string scheme; // rel15, rel16, polardensenet
        std::string params; // "L=2", "L=2 M=3", "gamma=1/8 beta=2"
        int bits = 0;
        double nmse_linear = 0.0;
        double nmse_db = 0.0;
        double rho = 0.0;
        std::size_t n_samples = 0;
    };

    // "scheme,params,bits,nmse_db,rho,n_samples"
    std::string metrics_header();
    std::string metrics_row(const MetricsRecord &r);

    struct NoiseRecord
    {
        std::string arm;
        std::string noise; // "clean" or the range label
        double rho = 0.0;
        double nmse_db = 0.0;
    };

    struct HeatmapCell
    {
        std::string source; // "H" or an arm name
        int row = 0;
        int col = 0;
        double magnitude = 0.0;
    };

    struct ExperimentResult
    {
        std::vector<MetricsRecord> metrics;
        std::vector<NoiseRecord> noise;
        std::vector<HeatmapCell> heatmap;

        std::string metrics_csv() const;
        std::string noise_csv() const;   // "arm,noise,rho,nmse_db"
        std::string heatmap_csv() const; // "source,row,col,magnitude"
    };

    /// Scores every arm on the same samples, clean and under each noise range.
    /// Noisy inputs depend only on (seed, range, draw), so all arms see the same ones.
    ExperimentResult run_experiment(const ExperimentConfig &cfg, std::span<const PrecoderChannelMatrix> samples);

    // Loads the dataset slice, runs, and writes metrics.csv, rho_bars.csv and heatmap.csv into out.
    ExperimentResult run_experiment(const ExperimentConfig &cfg, const std::filesystem::path &out);

    // Only the heatmap rows for one sample; writes <out>/heatmap.csv.
    ExperimentResult run_inspect(const ExperimentConfig &cfg, std::size_t sample, const std::filesystem::path &out);

    std::string to_string(ArmKind kind);
}
