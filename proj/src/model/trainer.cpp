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

#include "csifb/model/trainer.hpp"

#include "csifb/error.hpp"
#include "csifb/eval/metrics.hpp"
#include "csifb/nn/functional.hpp"
#include "csifb/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace csifb::model
{
    std::string TrainingHistory::csv() const
    {
        std::ostringstream os;
        os << "epoch,lr,train_mse,val_mse,val_nmse_db\n";
        os << std::setprecision(8);
        for (const auto &e : epochs)
            os << e.epoch << "," << e.lr << "," << e.train_mse << "," << e.val_mse << ","
               << eval::format_db(e.val_nmse_db, 6) << "\n";
        return os.str();
    }

    void TrainingHistory::write_csv(const std::filesystem::path &path) const
    {
        std::ofstream os(path, std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot write training history " + path.string());
        os << csv();
    }

    template <typename T>
    Evaluation evaluate(PolarDenseNet<T> &model, std::span<const PrecoderChannelMatrix> targets,
                        std::span<const channel::CMatrix> inputs)
    {
        if (targets.size() != inputs.size() || targets.empty())
            throw DimensionError("evaluate: need equally many (non-zero) targets and inputs");
        const auto recon = reconstruct(model, inputs);
        Evaluation e;
        for (std::size_t i = 0; i < targets.size(); ++i)
            e.mse += (recon[i].matrix() - targets[i].matrix()).squaredNorm();
        e.mse /= static_cast<double>(targets.size());
        const auto n = eval::nmse(targets, recon);
        e.nmse = n.linear;
        e.nmse_db = n.db;
        e.rho = eval::cosine_similarity(targets, recon);
        return e;
    }

    template <typename T>
    Evaluation evaluate(PolarDenseNet<T> &model, std::span<const PrecoderChannelMatrix> samples)
    {
        std::vector<channel::CMatrix> inputs;
        inputs.reserve(samples.size());
        for (const auto &s : samples)
            inputs.push_back(s.matrix());
        return evaluate(model, samples, std::span<const channel::CMatrix>(inputs));
    }

    namespace
    {
        // Flush-to-zero and denormals-are-zero for the duration of training. Late
        // in a run some gradients decay into the denormal range, where every
        // multiply takes the slow path and the dense backward pass runs ~4x slower.
        class DenormalGuard
        {
        public:
#if defined(__SSE__)
            DenormalGuard() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
            ~DenormalGuard() { _mm_setcsr(saved_); }

        private:
            unsigned saved_;
#endif
        };

        template <typename T>
        std::vector<std::vector<T>> snapshot(const PolarDenseNet<T> &model)
        {
            std::vector<std::vector<T>> out;
            for (const auto &p : model.parameters())
                out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
            for (const auto &b : model.buffers())
                out.emplace_back(b.tensor.data().begin(), b.tensor.data().end());
            return out;
        }

        template <typename T>
        void restore(PolarDenseNet<T> &model, const std::vector<std::vector<T>> &values)
        {
            auto tensors = model.parameters();
            for (auto &b : model.buffers())
                tensors.push_back(b);
            for (std::size_t i = 0; i < tensors.size(); ++i)
                std::copy(values[i].begin(), values[i].end(), tensors[i].tensor.data().begin());
        }
    }

    template <typename T>
    TrainingHistory train(PolarDenseNet<T> &model, std::span<const PrecoderChannelMatrix> train_set,
                          std::span<const PrecoderChannelMatrix> val_set, const TrainHyper &hyper,
                          const EpochCallback &on_epoch)
    {
        if (train_set.size() < 2 || val_set.empty())
            throw ConfigError("train: need at least two training samples and one validation sample");
        if (hyper.batch_size < 2)
            throw ConfigError("train: batch size must be >= 2 for batch normalization");
        for (auto set : {train_set, val_set})
            for (const auto &s : set)
                if (s.n() != model.config().n || s.k() != model.config().k)
                    throw DimensionError("train: sample shape does not match the model");
        const DenormalGuard denormals;

        const nn::CosineWarmupSchedule schedule{hyper.lr_min, hyper.lr_max, hyper.warmup, hyper.epochs};
        schedule.lr(0); // validates the schedule before any work

        std::mt19937_64 rng(hyper.seed);
        std::mt19937_64 noise_rng(channel::sample_seed(hyper.seed, 0xA5A5));

        std::vector<channel::CMatrix> val_inputs;
        if (hyper.noise)
            val_inputs = eval::add_awgn(val_set, *hyper.noise, noise_rng);
        else
            for (const auto &s : val_set)
                val_inputs.push_back(s.matrix());

        nn::Adam<T> adam(model.parameter_tensors());
        TrainingHistory history;
        history.initial_val_mse = evaluate(model, val_set, std::span<const channel::CMatrix>(val_inputs)).mse;
        history.best_val_mse = history.initial_val_mse;
        auto best = snapshot(model);

        std::vector<std::size_t> order(train_set.size());
        std::iota(order.begin(), order.end(), 0);
        const auto batch_size = static_cast<std::size_t>(hyper.batch_size);

        for (int epoch = 0; epoch < hyper.epochs; ++epoch)
        {
            const double lr = schedule.lr(epoch);
            std::shuffle(order.begin(), order.end(), rng);
            double loss_sum = 0.0;
            std::size_t seen = 0;
            for (std::size_t start = 0; start < order.size(); start += batch_size)
            {
                const auto count = std::min(batch_size, order.size() - start);
                if (count < 2)
                    break; // batch statistics need two samples
                std::vector<PrecoderChannelMatrix> targets;
                targets.reserve(count);
                for (std::size_t i = 0; i < count; ++i)
                    targets.push_back(train_set[order[start + i]]);
                Tensor<T> target = to_tensor<T>(std::span<const PrecoderChannelMatrix>(targets));
                Tensor<T> input = target;
                if (hyper.noise)
                {
                    const auto noisy = eval::add_awgn(targets, *hyper.noise, noise_rng);
                    input = to_tensor<T>(std::span<const channel::CMatrix>(noisy));
                }

                Tape<T> tape;
                const auto pred = model.forward(tape, input, Mode::train);
                const auto loss = nn::mse_loss(tape, pred, target);
                const double value = static_cast<double>(loss.item());
                if (!std::isfinite(value))
                    throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                          std::to_string(start / batch_size) + " (lr " + std::to_string(lr) + ")");
                adam.zero_grad();
                tape.backward(loss);
                adam.step(lr);
                loss_sum += value * static_cast<double>(count);
                seen += count;
            }

            const auto val = evaluate(model, val_set, std::span<const channel::CMatrix>(val_inputs));
            if (!std::isfinite(val.mse))
                throw DivergenceError("train: non-finite validation loss at epoch " + std::to_string(epoch) +
                                      " (lr " + std::to_string(lr) + ")");
            EpochRecord rec{epoch, lr, loss_sum / static_cast<double>(std::max<std::size_t>(seen, 1)), val.mse,
                            val.nmse_db};
            history.epochs.push_back(rec);
            // best_epoch stays -1 if nothing beats the initial weights, which are then kept
            if (val.mse < history.best_val_mse)
            {
                history.best_val_mse = val.mse;
                history.best_epoch = epoch;
                best = snapshot(model);
            }
            if (on_epoch)
                on_epoch(rec);
        }
        restore(model, best);
        return history;
    }

    template Evaluation evaluate<float>(PolarDenseNet<float> &, std::span<const PrecoderChannelMatrix>,
                                        std::span<const channel::CMatrix>);
    template Evaluation evaluate<double>(PolarDenseNet<double> &, std::span<const PrecoderChannelMatrix>,
                                         std::span<const channel::CMatrix>);
    template Evaluation evaluate<float>(PolarDenseNet<float> &, std::span<const PrecoderChannelMatrix>);
    template Evaluation evaluate<double>(PolarDenseNet<double> &, std::span<const PrecoderChannelMatrix>);
    template TrainingHistory train<float>(PolarDenseNet<float> &, std::span<const PrecoderChannelMatrix>,
                                          std::span<const PrecoderChannelMatrix>, const TrainHyper &,
                                          const EpochCallback &);
    template TrainingHistory train<double>(PolarDenseNet<double> &, std::span<const PrecoderChannelMatrix>,
                                           std::span<const PrecoderChannelMatrix>, const TrainHyper &,
                                           const EpochCallback &);
}
