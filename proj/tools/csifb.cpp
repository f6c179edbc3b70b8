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

// csifb generate | train | eval | inspect --config <ini> [--seed <u64>] [--out <dir>]
//
// Exit codes: 0 success, 1 other failure, 2 bad config or usage, 3 missing artifact.

#include "csifb/error.hpp"
#include "csifb/eval/experiment.hpp"
#include "csifb/eval/metrics.hpp"

#include <CLI11.hpp>

#include <malloc.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

namespace
{
    constexpr int kConfigError = 2;
    constexpr int kMissingArtifact = 3;

    struct Common
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::string out = ".";
    };

    void add_common(CLI::App *cmd, Common &c)
    {
        cmd->add_option("--config", c.config, "INI config file")->required();
        cmd->add_option("--seed", c.seed, "Overrides the seed in the config");
        cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
    }

    int do_generate(const Common &c)
    {
        auto cfg = csifb::eval::GenerateConfig::load(c.config);
        if (c.seed)
            cfg.seed = *c.seed;
        const auto path = csifb::eval::run_generate(cfg, c.out);
        std::cout << "wrote " << cfg.count << " samples (N=" << cfg.channel.n() << ", K=" << cfg.channel.k()
                  << ") to " << path.string() << "\n";
        return 0;
    }

    int do_train(const Common &c)
    {
        auto cfg = csifb::eval::TrainConfig::load(c.config);
        if (c.seed)
            cfg.hyper.seed = *c.seed;
        const auto start = std::chrono::steady_clock::now();
        const auto outcome = csifb::eval::run_train(cfg, c.out, [&](const csifb::model::EpochRecord &r) {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::fprintf(stderr, "epoch %4d  lr %.6f  train %.5f  val %.5f  val_nmse %7.3f dB  %.0fs\n", r.epoch, r.lr,
                         r.train_mse, r.val_mse, r.val_nmse_db, elapsed);
        });
        std::cout << "best epoch " << outcome.training.best_epoch << ", validation NMSE "
                  << csifb::eval::format_db(outcome.validation.nmse_db) << " dB, rho " << outcome.validation.rho
                  << "\ncheckpoint " << outcome.checkpoint.string() << "\nhistory " << outcome.history.string()
                  << "\n";
        return 0;
    }

    int do_eval(const Common &c)
    {
        auto cfg = csifb::eval::ExperimentConfig::load(c.config);
        if (c.seed)
            cfg.seed = *c.seed;
        const auto result = csifb::eval::run_experiment(cfg, c.out);
        std::cout << result.metrics_csv();
        return 0;
    }

    int do_inspect(const Common &c, std::optional<std::size_t> sample)
    {
        auto cfg = csifb::eval::ExperimentConfig::load(c.config);
        if (c.seed)
            cfg.seed = *c.seed;
        const auto result = csifb::eval::run_inspect(cfg, sample.value_or(cfg.heatmap_sample), c.out);
        std::cout << "wrote " << result.heatmap.size() << " heatmap cells to "
                  << (std::filesystem::path(c.out) / "heatmap.csv").string() << "\n";
        return 0;
    }
}

int main(int argc, char **argv)
{
    // Keep freed training buffers in the heap instead of returning them to the OS.
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);

    CLI::App app{"csifb: CSI feedback compression lab"};
    app.require_subcommand(1);

    Common generate_opts, train_opts, eval_opts, inspect_opts;
    std::optional<std::size_t> sample;
    auto *generate = app.add_subcommand("generate", "Synthesize a precoder-matrix dataset");
    add_common(generate, generate_opts);
    auto *train = app.add_subcommand("train", "Train the autoencoder");
    add_common(train, train_opts);
    auto *evaluate = app.add_subcommand("eval", "Score every configured arm and write CSV tables");
    add_common(evaluate, eval_opts);
    auto *inspect = app.add_subcommand("inspect", "Dump |H| and each arm's |Hhat| for one sample");
    add_common(inspect, inspect_opts);
    inspect->add_option("--sample", sample, "Dataset index (defaults to heatmap_sample)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try
    {
        if (*generate)
            return do_generate(generate_opts);
        if (*train)
            return do_train(train_opts);
        if (*evaluate)
            return do_eval(eval_opts);
        return do_inspect(inspect_opts, sample);
    }
    catch (const csifb::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const csifb::MissingArtifact &e)
    {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return kMissingArtifact;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
