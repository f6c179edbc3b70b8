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

#include "csifb/eval/noise.hpp"
#include "csifb/model/polardensenet.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csifb::model
{
    struct TrainHyper
    {
        int epochs = 400;
        int batch_size = 200;
        double lr_max = 1e-2;
        double lr_min = 1e-4;
        int warmup = 30;
        std::uint64_t seed = 1;
        // Same SNR distribution on training inputs and validation inputs; targets stay clean.
        std::optional<eval::NoiseSpec> noise;
    };

    struct EpochRecord
    {
        int epoch = 0;
        double lr = 0.0;
        double train_mse = 0.0;
        double val_mse = 0.0;
        double val_nmse_db = 0.0;
    };

    struct TrainingHistory
    {
        double initial_val_mse = 0.0;
        std::vector<EpochRecord> epochs;
        int best_epoch = -1;
        double best_val_mse = 0.0;

        // "epoch,lr,train_mse,val_mse,val_nmse_db"
        std::string csv() const;
        void write_csv(const std::filesystem::path &path) const;
    };

    struct Evaluation
    {
        double mse = 0.0;     // mean squared Frobenius error per sample
        double nmse = 0.0;    // linear, mean over samples
        double nmse_db = 0.0;
        double rho = 0.0;
    };

    /// Eval-mode, quantized reconstruction of `inputs` scored against `targets`.
    template <typename T>
    Evaluation evaluate(PolarDenseNet<T> &model, std::span<const PrecoderChannelMatrix> targets,
                        std::span<const channel::CMatrix> inputs);
    template <typename T>
    Evaluation evaluate(PolarDenseNet<T> &model, std::span<const PrecoderChannelMatrix> samples);

    using EpochCallback = std::function<void(const EpochRecord &)>;

    /// Minimizes the batch-mean squared Frobenius error with Adam under the
    /// warm-up cosine schedule. The straight-through quantizer stays in the loop.
    /// The model ends holding the weights of its best validation epoch.
    /// Throws DivergenceError when a batch loss turns non-finite.
    template <typename T>
    TrainingHistory train(PolarDenseNet<T> &model, std::span<const PrecoderChannelMatrix> train_set,
                          std::span<const PrecoderChannelMatrix> val_set, const TrainHyper &hyper,
                          const EpochCallback &on_epoch = {});

    extern template TrainingHistory train<float>(PolarDenseNet<float> &, std::span<const PrecoderChannelMatrix>,
                                                 std::span<const PrecoderChannelMatrix>, const TrainHyper &,
                                                 const EpochCallback &);
    extern template TrainingHistory train<double>(PolarDenseNet<double> &, std::span<const PrecoderChannelMatrix>,
                                                  std::span<const PrecoderChannelMatrix>, const TrainHyper &,
                                                  const EpochCallback &);
}
