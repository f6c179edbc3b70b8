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

// Acceptance suite. Prints one "PASS criterion N: ..." or "FAIL criterion N: ..."
// line per criterion and exits non-zero if any failed.
//
//   acceptance [--only N]... [--workdir DIR] [--report FILE]
//
// The full run trains three desk-scale models and takes well over an hour on one core.

#include "csifb/channel/dataset.hpp"
#include "csifb/channel/synth.hpp"
#include "csifb/codebook/typeii.hpp"
#include "csifb/error.hpp"
#include "csifb/eval/experiment.hpp"
#include "csifb/eval/metrics.hpp"
#include "csifb/eval/noise.hpp"
#include "csifb/model/polardensenet.hpp"
#include "csifb/model/trainer.hpp"
#include "csifb/nn/functional.hpp"
#include "csifb/nn/layers.hpp"
#include "csifb/nn/optim.hpp"
#include "csifb/ops.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <malloc.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#ifndef CSIFB_CLI_PATH
#error "CSIFB_CLI_PATH must point at the csifb executable"
#endif

namespace fs = std::filesystem;
using namespace csifb;
using ad::Tape;
using ad::Tensor;
using channel::cdouble;
using channel::CMatrix;
using channel::PrecoderChannelMatrix;
using testing::grad_check;
using testing::project;
using testing::random_tensor;

namespace
{
    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

    std::string fmt(const char *format, auto... args)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, format, args...);
        return buf;
    }

    double median3(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    }

    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    // Desk-scale corpus: default channel (N = 32, K = 13, 8 paths), 5000 samples,
    // the first 4000 for training and the rest for validation.
    constexpr std::size_t kCorpus = 5000;
    constexpr std::size_t kTrain = 4000;
    constexpr std::uint64_t kCorpusSeed = 2026;
    constexpr int kEpochs = 150;
    constexpr double kBudgetSeconds = 30.0 * 60.0;

    struct Context
    {
        fs::path work;
        std::vector<PrecoderChannelMatrix> corpus;
        std::map<std::uint64_t, fs::path> checkpoints; // seed -> gamma = 1/8 model from criterion 5

        std::span<const PrecoderChannelMatrix> all()
        {
            if (corpus.empty())
            {
                std::fprintf(stderr, "generating the %zu-sample corpus\n", kCorpus);
                corpus = channel::generate_dataset(channel::ChannelConfig{}, kCorpusSeed, kCorpus);
            }
            return corpus;
        }
        std::span<const PrecoderChannelMatrix> train_set() { return all().subspan(0, kTrain); }
        std::span<const PrecoderChannelMatrix> val_set() { return all().subspan(kTrain); }

        struct Trained
        {
            fs::path checkpoint;
            double seconds = 0.0;
            model::Evaluation val;
        };

        Trained train_desk_model(std::uint64_t seed)
        {
            model::PolarDenseNet<float> net(model::PolarDenseNetConfig::preset(8), seed);
            model::TrainHyper hyper;
            hyper.epochs = kEpochs;
            hyper.batch_size = 200;
            hyper.warmup = 30;
            hyper.seed = seed;
            const auto t0 = Clock::now();
            model::train(net, train_set(), val_set(), hyper, [&](const model::EpochRecord &r) {
                if (r.epoch % 10 == 9)
                    std::fprintf(stderr, "  seed %llu epoch %3d val %7.3f dB  %.0fs\n",
                                 static_cast<unsigned long long>(seed), r.epoch + 1, r.val_nmse_db,
                                 seconds_since(t0));
            });
            Trained t;
            t.seconds = seconds_since(t0);
            t.val = model::evaluate(net, val_set());
            t.checkpoint = work / ("gamma8_seed" + std::to_string(seed) + ".ckpt");
            net.save(t.checkpoint);
            checkpoints[seed] = t.checkpoint;
            return t;
        }
    };

    CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g;
        CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = cdouble(g(rng), g(rng));
        return m;
    }

    std::vector<double> values(const Tensor<double> &t) { return {t.data().begin(), t.data().end()}; }

    // ---- 1 ----------------------------------------------------------------

    Outcome gradients(Context &)
    {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(101);
        double worst = 0.0;
        std::string worst_name;
        std::size_t coords = 0, refined = 0;
        int checks = 0;
        const auto note = [&](const std::string &name, const testing::GradCheck &r) {
            coords += r.checked;
            ++checks;
            refined += r.refined;
            if (r.max_rel_error >= 1e-4)
                std::fprintf(stderr, "  %s: rel %.2e at [%zu][%zu] analytic %.9e numeric %.9e\n", name.c_str(),
                             r.max_rel_error, r.worst_tensor, r.worst_index, r.worst_analytic, r.worst_numeric);
            if (r.max_rel_error >= worst)
            {
                worst = r.max_rel_error;
                worst_name = name;
            }
        };
        const auto check = [&](const std::string &name, const std::vector<Tensor<double>> &wrt, const ad::Shape &out,
                               const std::function<Tensor<double>(Tape<double> &)> &fn, std::size_t n = 100) {
            const auto w = random_tensor(out, rng);
            note(name, grad_check(wrt, [&](Tape<double> &t) { return project(t, fn(t), w); }, n, rng));
        };

        // primitive ops
        auto a = random_tensor({3, 4}, rng), b = random_tensor({3, 4}, rng), m = random_tensor({4, 2}, rng);
        auto v = random_tensor({4}, rng), x3 = random_tensor({2, 3, 4}, rng);
        check("matmul", {a, m}, {3, 2}, [&](Tape<double> &t) { return ad::matmul(t, a, m); });
        check("add", {a, b}, {3, 4}, [&](Tape<double> &t) { return ad::add(t, a, b); });
        check("add broadcast", {a, v}, {3, 4}, [&](Tape<double> &t) { return ad::add(t, a, v); });
        check("sub", {a, b}, {3, 4}, [&](Tape<double> &t) { return ad::sub(t, a, b); });
        check("mul", {a, b}, {3, 4}, [&](Tape<double> &t) { return ad::mul(t, a, b); });
        check("scale", {a}, {3, 4}, [&](Tape<double> &t) { return ad::scale(t, a, -1.7); });
        check("concat", {a, b}, {3, 8}, [&](Tape<double> &t) {
            const std::vector<Tensor<double>> parts{a, b};
            return ad::concat(t, std::span<const Tensor<double>>(parts), 1);
        });
        check("slice", {x3}, {2, 2, 4}, [&](Tape<double> &t) { return ad::slice(t, x3, 1, 1, 3); });
        check("reshape", {x3}, {6, 4}, [&](Tape<double> &t) { return ad::reshape(t, x3, {6, 4}); });
        check("transpose", {a}, {4, 3}, [&](Tape<double> &t) { return ad::transpose(t, a); });
        check("sum", {a}, {1}, [&](Tape<double> &t) { return ad::sum(t, ad::mul(t, a, a)); });
        check("mean", {a}, {1}, [&](Tape<double> &t) { return ad::mean(t, ad::mul(t, a, b)); });

        // layer primitives
        for (auto [kh, kw] : std::vector<std::pair<std::size_t, std::size_t>>{{8, 1}, {1, 8}, {3, 3}, {1, 1}})
        {
            auto x = random_tensor({2, 3, 16, 13}, rng), w = random_tensor({4, 3, kh, kw}, rng);
            auto bias = random_tensor({4}, rng);
            check("conv2d " + std::to_string(kh) + "x" + std::to_string(kw), {x, w, bias}, {2, 4, 16, 13},
                  [&](Tape<double> &t) { return nn::conv2d(t, x, w, bias); });
        }
        {
            auto x = random_tensor({50, 12, 16, 13}, rng), w = random_tensor({5, 12, 3, 3}, rng);
            auto bias = random_tensor({5}, rng);
            check("conv2d chunked", {x, w, bias}, {50, 5, 16, 13},
                  [&](Tape<double> &t) { return nn::conv2d(t, x, w, bias); });
        }
        auto xb = random_tensor({4, 3, 5, 2}, rng), gamma = random_tensor({3}, rng, 0.5, 1.5);
        auto beta = random_tensor({3}, rng);
        check("batch_norm train", {xb, gamma, beta}, {4, 3, 5, 2},
              [&](Tape<double> &t) { return nn::batch_norm_train(t, xb, gamma, beta, 1e-5); });
        const std::vector<double> rm{0.3, -0.2, 0.1}, rv{1.7, 0.4, 0.9};
        check("batch_norm eval", {xb, gamma, beta}, {4, 3, 5, 2},
              [&](Tape<double> &t) { return nn::batch_norm_eval<double>(t, xb, gamma, beta, rm, rv, 1e-5); });
        auto xe = random_tensor({3, 2, 4, 5}, rng), ye = random_tensor({3, 2, 4, 5}, rng);
        check("lrelu", {xe}, {3, 2, 4, 5}, [&](Tape<double> &t) { return nn::lrelu(t, xe, 0.3); });
        check("sigmoid", {xe}, {3, 2, 4, 5}, [&](Tape<double> &t) { return nn::sigmoid(t, xe); });
        check("normalize_columns", {xe}, {3, 2, 4, 5}, [&](Tape<double> &t) { return nn::normalize_columns(t, xe); });
        note("mse_loss", grad_check({xe, ye}, [&](Tape<double> &t) { return nn::mse_loss(t, xe, ye); }, 100, rng));

        // layers with their own parameters
        {
            std::mt19937_64 init(8);
            nn::Dense<double> dense(48, 5, init);
            nn::ConvBnAct<double> unit(2, 3, 3, 3, 0.3, init);
            std::vector<nn::NamedTensor<double>> params;
            dense.collect("dense", params);
            std::vector<Tensor<double>> wrt;
            for (auto &p : params)
                wrt.push_back(p.tensor);
            auto xd = random_tensor({3, 48}, rng);
            wrt.push_back(xd);
            check("Dense", wrt, {3, 5}, [&](Tape<double> &t) { return dense.forward(t, xd); });

            params.clear();
            unit.collect("unit", params);
            wrt.clear();
            for (auto &p : params)
                wrt.push_back(p.tensor);
            auto xc = random_tensor({3, 2, 4, 4}, rng);
            wrt.push_back(xc);
            check("ConvBnAct", wrt, {3, 3, 4, 4}, [&](Tape<double> &t) { return unit.forward(t, xc, nn::Mode::train); });
        }

        // full graph at the real size, quantizer bypassed; every parameter tensor is probed.
        // LReLU kinks sit inside the finite-difference step here, hence the refined estimates.
        for (bool shared : {false, true})
        {
            auto cfg = model::PolarDenseNetConfig::preset(8);
            cfg.quantize = false;
            cfg.shared_paths = shared;
            model::PolarDenseNet<double> net(cfg, 9);
            std::vector<PrecoderChannelMatrix> targets{PrecoderChannelMatrix::canonical(random_complex(32, 13, rng)),
                                                       PrecoderChannelMatrix::canonical(random_complex(32, 13, rng))};
            const auto target = model::to_tensor<double>(std::span<const PrecoderChannelMatrix>(targets));
            const auto x = random_tensor({2, 2, 32, 13}, rng);
            const auto loss = [&](Tape<double> &t) {
                return nn::mse_loss(t, net.forward(t, x, nn::Mode::train), target);
            };
            const std::string name = shared ? "PolarDenseNet shared paths" : "PolarDenseNet";
            for (const auto &p : net.parameters())
                note(name + " " + p.name, grad_check({p.tensor}, loss, std::min<std::size_t>(p.tensor.size(), 4), rng,
                                                       1e-5, 1e-3, true));
            note(name + " input", grad_check({x}, loss, 20, rng, 1e-5, 1e-3, true));
        }

        const double elapsed = seconds_since(t0);
        const bool pass = worst < 1e-4 && elapsed < 120.0;
        return {pass, fmt("%d checks, %zu coordinates (%zu re-differenced at eps/10 because the two step sizes disagreed), "
                          "worst relative error %.2e (%s) < 1e-4, %.1f s < 120 s",
                          checks, coords, refined, worst, worst_name.c_str(), elapsed)};
    }

    // ---- 2 ----------------------------------------------------------------

    Outcome conv_oracle(Context &)
    {
        std::mt19937_64 rng(202);
        const std::vector<std::pair<std::size_t, std::size_t>> kernels{{8, 1}, {1, 8}, {3, 3}, {1, 1}, {2, 2}, {5, 3}};
        std::uniform_int_distribution<std::size_t> batch(1, 6), chans(1, 12), extent(1, 16);
        double worst = 0.0;
        std::set<std::string> seen;
        for (int cfg = 0; cfg < 50; ++cfg)
        {
            const auto [kh, kw] = kernels[static_cast<std::size_t>(cfg) % kernels.size()];
            // every tenth configuration spans several internal chunks
            const std::size_t b = cfg % 10 == 9 ? 48 : batch(rng);
            const auto in = chans(rng), out = chans(rng), h = extent(rng), w = extent(rng);
            auto x = random_tensor({b, in, h, w}, rng);
            auto wt = random_tensor({out, in, kh, kw}, rng);
            auto bias = random_tensor({out}, rng);
            Tape<double> tape(Tape<double>::Mode::inference);
            const auto y = nn::conv2d(tape, x, wt, bias);
            if (y.shape() != ad::Shape{b, out, h, w})
                return {false, "config " + std::to_string(cfg) + " produced shape " + ad::shape_string(y.shape())};
            const auto ref = testing::conv2d_naive(values(x), b, in, h, w, values(wt), out, kh, kw, values(bias));
            for (std::size_t i = 0; i < ref.size(); ++i)
                worst = std::max(worst, std::abs(ref[i] - y[i]));
            seen.insert(std::to_string(kh) + "x" + std::to_string(kw));
        }
        const bool pass = worst <= 1e-10 && seen.count("8x1") && seen.count("1x8");
        return {pass, fmt("50 configurations including 8x1 and 1x8 kernels, max |conv2d - loop oracle| %.2e <= 1e-10",
                          worst)};
    }

    // ---- 3 ----------------------------------------------------------------

    Outcome codebook_exactness(Context &ctx)
    {
        using namespace codebook;
        const AntennaConfig ula{16, 1};
        const QuantConfig off{false};
        const auto samples = ctx.val_set();

        double worst_exact_db = -std::numeric_limits<double>::infinity();
        double worst_rel16 = 0.0;
        int l_nested = 0, l_nested_rel16 = 0, m_nested = 0;
        for (const auto &h : samples)
        {
            const auto full = compress(Scheme::rel15, h, ula, 4, 1, 16, 0, off);
            worst_exact_db = std::max(worst_exact_db, eval::nmse(h, full.reconstruction).db);

            double nmse_l[2] = {0.0, 0.0}, nmse_l16[2] = {0.0, 0.0};
            for (int i = 0; i < 2; ++i)
            {
                const int l = i == 0 ? 2 : 4;
                const auto a = compress(Scheme::rel15, h, ula, 4, 1, l, 0, off);
                const auto b = compress(Scheme::rel16, h, ula, 4, 1, l, h.k(), off);
                worst_rel16 = std::max(
                    worst_rel16, (a.reconstruction.matrix() - b.reconstruction.matrix()).cwiseAbs().maxCoeff());
                nmse_l[i] = eval::nmse(h, a.reconstruction).linear;
                nmse_l16[i] = eval::nmse(h, b.reconstruction).linear;
            }
            l_nested += nmse_l[1] <= nmse_l[0] + 1e-12;
            l_nested_rel16 += nmse_l16[1] <= nmse_l16[0] + 1e-12;

            const double m3 = eval::nmse(h, compress(Scheme::rel16, h, ula, 4, 1, 4, 3, off).reconstruction).linear;
            const double m7 = eval::nmse(h, compress(Scheme::rel16, h, ula, 4, 1, 4, 7, off).reconstruction).linear;
            m_nested += m7 <= m3 + 1e-12;
        }
        const int n = static_cast<int>(samples.size());
        const bool pass = worst_exact_db <= -250.0 && worst_rel16 <= 1e-10 && l_nested == n && l_nested_rel16 == n &&
                          m_nested == n;
        return {pass, fmt("complete-basis rel15 worst NMSE %.1f dB <= -250; rel16 M=K vs rel15 max diff %.2e <= 1e-10; "
                          "NMSE(L=4) <= NMSE(L=2) on %d/%d (rel15) and %d/%d (rel16 M=K); NMSE(M=7) <= NMSE(M=3) on "
                          "%d/%d",
                          worst_exact_db, worst_rel16, l_nested, n, l_nested_rel16, n, m_nested, n)};
    }

    // ---- 4 ----------------------------------------------------------------

    Outcome bit_accounting(Context &)
    {
        const std::vector<std::pair<int, int>> expected{{8, 208}, {16, 104}, {20, 80}};
        bool pass = true;
        std::string got;
        for (auto [inv, bits] : expected)
        {
            const auto cfg = model::PolarDenseNetConfig::preset(inv);
            model::PolarDenseNet<float> net(cfg, 1);
            const auto code = model::quantize(model::encode_sample(net, PrecoderChannelMatrix::canonical(
                                                                            CMatrix::Identity(32, 13))),
                                              cfg.beta, cfg.gamma);
            const auto packed = code.pack();
            const bool ok = cfg.n == 32 && cfg.k == 13 && cfg.beta == 2 && cfg.feedback_bits() == bits &&
                            static_cast<int>(code.bit_length()) == bits &&
                            static_cast<int>(packed.size()) == (bits + 7) / 8;
            pass = pass && ok;
            got += (got.empty() ? "" : "/") + std::to_string(cfg.feedback_bits());
        }

        using namespace codebook;
        const auto bits = [](Scheme s, int l, int m) {
            BitConfig c;
            c.scheme = s;
            c.antenna = {16, 1};
            c.l = l;
            c.m = m;
            return count_bits(c).total();
        };
        return {pass, fmt("gamma 1/8, 1/16, 1/20 at beta=2, N=32, K=13 give %s bits (expected 208/104/80); codebook "
                          "reference counts: rel15 L=2 %d, rel15 L=4 %d, rel16 L=2 M=3 %d, rel16 L=4 M=3 %d",
                          got.c_str(), bits(Scheme::rel15, 2, 0), bits(Scheme::rel15, 4, 0),
                          bits(Scheme::rel16, 2, 3), bits(Scheme::rel16, 4, 3))};
    }

    // ---- 5 ----------------------------------------------------------------

    Outcome desk_training(Context &ctx)
    {
        std::vector<double> nmse, rho, secs;
        std::string per_seed;
        for (std::uint64_t seed : {1u, 2u, 3u})
        {
            std::fprintf(stderr, "criterion 5: training seed %llu\n", static_cast<unsigned long long>(seed));
            const auto t = ctx.train_desk_model(seed);
            nmse.push_back(t.val.nmse_db);
            rho.push_back(t.val.rho);
            secs.push_back(t.seconds);
            per_seed += fmt(" seed%llu=(%.2f dB, %.4f, %.0f s)", static_cast<unsigned long long>(seed),
                            t.val.nmse_db, t.val.rho, t.seconds);
        }

        // the reference arm goes through the same evaluation path as the command line tool
        eval::ExperimentConfig cfg;
        cfg.arms.push_back({"rel16_l2_m3", eval::ArmKind::rel16, 2, 3, {}});
        cfg.arms.push_back({"ae", eval::ArmKind::autoencoder, 0, 0, ctx.checkpoints.at(1)});
        const auto result = eval::run_experiment(cfg, ctx.val_set());
        const auto &rel16 = result.metrics.at(0);
        const auto &ae = result.metrics.at(1);

        const double med_nmse = median3(nmse), med_rho = median3(rho), med_secs = median3(secs);
        const bool pass = med_nmse <= -4.0 && med_rho >= 0.85 && med_rho > rel16.rho && med_secs <= kBudgetSeconds;
        return {pass, fmt("median of 3 seeds: val NMSE %.3f dB <= -4, rho %.4f >= 0.85 and > rel16 L=2 M=3 rho %.4f "
                          "(%d bits vs %d bits), training time %.0f s <= %.0f s;",
                          med_nmse, med_rho, rel16.rho, ae.bits, rel16.bits, med_secs, kBudgetSeconds) +
                          per_seed};
    }

    // ---- 6 ----------------------------------------------------------------

    Outcome memorization(Context &ctx)
    {
        const auto set = ctx.all().subspan(0, 32);
        auto cfg = model::PolarDenseNetConfig::preset(8);
        cfg.gamma = 0.25;
        model::PolarDenseNet<float> net(cfg, 1);
        model::TrainHyper hyper;
        hyper.epochs = 300;
        hyper.batch_size = 8;
        hyper.warmup = 30;
        hyper.seed = 1;
        const auto t0 = Clock::now();
        const auto history = model::train(net, set, set, hyper);
        const auto e = model::evaluate(net, set);
        return {e.nmse_db <= -20.0,
                fmt("32 samples, gamma 1/4, %zu epochs, batch 8: train NMSE %.2f dB <= -20 (rho %.5f, %.0f s)",
                    history.epochs.size(), e.nmse_db, e.rho, seconds_since(t0))};
    }

    // ---- 7 ----------------------------------------------------------------

    Outcome scheduler(Context &ctx)
    {
        const nn::CosineWarmupSchedule s{1e-4, 1e-2, 30, 400};
        const double at30 = s.lr(30), at400 = s.lr(400);
        // continuity: the steps on either side of the peak are no larger than one warm-up step
        const double warm_step = (1e-2 - 1e-4) / 30.0 * (1.0 + 1e-12);
        const double left = s.lr(30) - s.lr(29), right = s.lr(30) - s.lr(31);
        bool monotone = true;
        for (int t = 31; t <= 400; ++t)
            monotone = monotone && s.lr(t) <= s.lr(t - 1);

        // the trainer follows the same schedule epoch by epoch
        const auto small = ctx.all().subspan(0, 40);
        model::PolarDenseNetConfig mc;
        mc.gamma = 1.0 / 16.0;
        model::PolarDenseNet<float> net(mc, 1);
        model::TrainHyper hyper;
        hyper.epochs = 6;
        hyper.batch_size = 20;
        hyper.warmup = 2;
        const nn::CosineWarmupSchedule used{hyper.lr_min, hyper.lr_max, hyper.warmup, hyper.epochs};
        const auto history = model::train(net, small.subspan(0, 30), small.subspan(30), hyper);
        bool follows = history.epochs.size() == 6;
        for (const auto &e : history.epochs)
            follows = follows && e.lr == used.lr(e.epoch);

        const bool pass = at30 == 1e-2 && std::abs(at400 - 1e-4) <= 1e-16 && left > 0.0 && left <= warm_step &&
                          right >= 0.0 && right <= warm_step && monotone && follows;
        return {pass, fmt("lr(30) = %.17g, lr(400) = %.17g, steps around the peak %.3e / %.3e <= %.3e, "
                          "non-increasing on [30, 400]: %s, trainer follows the schedule: %s",
                          at30, at400, left, right, warm_step, monotone ? "yes" : "no", follows ? "yes" : "no")};
    }

    // ---- 8 ----------------------------------------------------------------

    Outcome metric_identities(Context &ctx)
    {
        std::mt19937_64 rng(808);
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        const auto samples = ctx.val_set();
        std::vector<std::string> failed;
        const auto expect = [&](bool ok, const std::string &what) {
            if (!ok)
                failed.push_back(what);
        };

        for (std::size_t i = 0; i < 20; ++i)
        {
            const auto &h = samples[i];
            const auto same = eval::nmse(h, h);
            expect(same.linear == 0.0 && std::isinf(same.db) && same.db < 0.0, "nmse(H, H)");
            expect(eval::nmse_sample(h.matrix(), CMatrix::Zero(h.n(), h.k())) == 1.0, "nmse(H, 0)");
            const auto scaled = eval::nmse(h, PrecoderChannelMatrix::wrap(h.matrix() * 1.1));
            expect(std::abs(scaled.linear - 0.01) <= 1e-12 && std::abs(scaled.db + 20.0) <= 1e-9, "nmse(H, 1.1 H)");
            expect(std::abs(eval::cosine_similarity(h, h) - 1.0) <= 1e-12, "rho(H, H)");
            CMatrix ortho = random_complex(h.n(), h.k(), rng);
            for (int k = 0; k < h.k(); ++k)
            {
                const auto hk = h.matrix().col(k);
                ortho.col(k) -= hk * (hk.adjoint() * ortho.col(k))(0) / hk.squaredNorm();
            }
            expect(eval::cosine_sample(h.matrix(), ortho) <= 1e-12, "rho(H, orthogonal)");
        }

        double worst_phase = 0.0;
        for (int draw = 0; draw < 1000; ++draw)
        {
            const auto &h = samples[static_cast<std::size_t>(draw) % samples.size()];
            CMatrix rotated = h.matrix();
            for (int k = 0; k < h.k(); ++k)
                rotated.col(k) *= std::polar(1.0, angle(rng));
            worst_phase = std::max(worst_phase, std::abs(eval::cosine_sample(h.matrix(), rotated) - 1.0));
        }
        expect(worst_phase <= 1e-12, "phase invariance");

        std::mt19937_64 noise(809);
        const auto quiet = eval::add_awgn(samples, eval::NoiseSpec{300.0, 300.0}, noise);
        double worst_quiet = 0.0, loud = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            worst_quiet = std::max(worst_quiet, eval::nmse_sample(samples[i].matrix(), quiet[i]));
        const auto noisy = eval::add_awgn(samples, eval::NoiseSpec{0.0, 0.0}, noise);
        for (std::size_t i = 0; i < samples.size(); ++i)
            loud += eval::nmse_sample(samples[i].matrix(), noisy[i]);
        const double loud_db = eval::to_db(loud / static_cast<double>(samples.size()));
        expect(eval::to_db(worst_quiet) < -250.0, "awgn at 300 dB");
        expect(std::abs(loud_db) <= 0.5, "awgn at 0 dB");

        eval::ExperimentConfig empty;
        const auto dir = ctx.work / "empty_arms";
        eval::run_experiment(empty, dir);
        std::ifstream metrics(dir / "metrics.csv");
        std::stringstream body;
        body << metrics.rdbuf();
        expect(body.str() == eval::metrics_header() + "\n", "empty arm list");

        std::string which;
        for (const auto &f : failed)
            which += " " + f;
        return {failed.empty(),
                fmt("NMSE and rho trivial cases on 20 samples, worst phase-invariance error %.2e over 1000 draws, "
                    "awgn 300 dB worst %.1f dB, awgn 0 dB %.3f dB, empty arm list header-only",
                    worst_phase, eval::to_db(worst_quiet), loud_db) +
                    (failed.empty() ? std::string() : "; failed:" + which)};
    }

    // ---- 9 ----------------------------------------------------------------

    Outcome awgn_ordering(Context &ctx)
    {
        if (!ctx.checkpoints.count(1))
        {
            std::fprintf(stderr, "criterion 9: training the seed-1 model\n");
            ctx.train_desk_model(1);
        }
        eval::ExperimentConfig cfg;
        cfg.seed = 7;
        cfg.noise = eval::NoiseSpec::presets();
        cfg.noise_draws = 3;
        cfg.arms.push_back({"ae", eval::ArmKind::autoencoder, 0, 0, ctx.checkpoints.at(1)});
        const auto result = eval::run_experiment(cfg, ctx.val_set());

        std::vector<double> rho;
        std::string rows;
        for (const auto &r : result.noise)
        {
            rows += fmt(" %s=%.4f", r.noise.c_str(), r.rho);
            if (r.noise != "clean")
                rho.push_back(r.rho);
        }
        bool pass = rho.size() == 3;
        for (std::size_t i = 1; i < rho.size(); ++i)
            pass = pass && rho[i] >= rho[i - 1] - 0.01;
        return {pass, "rho non-decreasing over 0-5, 5-10, 10-15 dB within 0.01 (3 draws each):" + rows};
    }

    // ---- 10 ---------------------------------------------------------------

    int run(const std::string &command)
    {
        const int status = std::system(command.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write_file(const fs::path &p, const std::string &text)
    {
        std::ofstream(p, std::ios::trunc) << text;
    }

    Outcome determinism(Context &ctx)
    {
        const auto dir = ctx.work / "cli";
        fs::create_directories(dir);
        write_file(dir / "generate.ini", "[generate]\ncount = 120\nseed = 5\n\n[channel]\nn1 = 16\nrbs = 52\n");
        model::PolarDenseNet<float>(model::PolarDenseNetConfig::preset(8), 4).save(dir / "model.ckpt");
        write_file(dir / "eval.ini", "[experiment]\ndataset = gen_a/dataset.bin\nseed = 3\nnoise = presets\n"
                                     "noise_draws = 2\nheatmap_sample = 5\n\n"
                                     "[arm.rel15]\nscheme = rel15\nl = 2\n\n"
                                     "[arm.rel16]\nscheme = rel16\nl = 2\nm = 3\n\n"
                                     "[arm.ae]\nscheme = polardensenet\ncheckpoint = model.ckpt\n");

        const std::string cli = CSIFB_CLI_PATH;
        const auto invoke = [&](const std::string &sub, const std::string &ini, const std::string &out) {
            return run("\"" + cli + "\" " + sub + " --config \"" + (dir / ini).string() + "\" --out \"" +
                       (dir / out).string() + "\" > \"" + (dir / (out + ".log")).string() + "\" 2>&1");
        };
        std::vector<std::string> problems;
        for (const char *out : {"gen_a", "gen_b"})
            if (invoke("generate", "generate.ini", out) != 0)
                problems.push_back(std::string("generate into ") + out + " failed");
        for (const char *out : {"eval_a", "eval_b"})
            if (invoke("eval", "eval.ini", out) != 0)
                problems.push_back(std::string("eval into ") + out + " failed");

        std::size_t bytes = 0;
        const auto same = [&](const fs::path &a, const fs::path &b) {
            const auto x = slurp(dir / a), y = slurp(dir / b);
            bytes += x.size();
            if (x.empty() || x != y)
                problems.push_back(a.filename().string() + " differs or is empty");
        };
        if (problems.empty())
        {
            same("gen_a/dataset.bin", "gen_b/dataset.bin");
            for (const char *f : {"metrics.csv", "rho_bars.csv", "heatmap.csv"})
                same(fs::path("eval_a") / f, fs::path("eval_b") / f);
        }
        std::string why;
        for (const auto &p : problems)
            why += "; " + p;
        return {problems.empty(), fmt("two runs each of `csifb generate` and `csifb eval` with fixed seeds, 4 files "
                                      "(%zu bytes) byte-identical",
                                      bytes) +
                                      why};
    }

    struct Criterion
    {
        int id;
        Outcome (*run)(Context &);
    };
}

int main(int argc, char **argv)
{
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);

    CLI::App app{"csifb acceptance suite"};
    std::vector<int> only;
    std::string workdir = (fs::temp_directory_path() / "csifb_acceptance").string();
    app.add_option("--only", only, "Run only these criteria (repeatable)")->check(CLI::Range(1, 10));
    app.add_option("--workdir", workdir, "Scratch directory (cleared first)")->capture_default_str();
    std::string report_path;
    app.add_option("--report", report_path, "Also write the PASS/FAIL lines to this file");
    CLI11_PARSE(app, argc, argv);

    Context ctx;
    ctx.work = workdir;
    fs::remove_all(ctx.work);
    fs::create_directories(ctx.work);

    const std::vector<Criterion> criteria{{1, gradients},          {2, conv_oracle},        {3, codebook_exactness},
                                          {4, bit_accounting},     {5, desk_training},      {6, memorization},
                                          {7, scheduler},          {8, metric_identities},  {9, awgn_ordering},
                                          {10, determinism}};
    std::ofstream report;
    if (!report_path.empty())
        report.open(report_path, std::ios::trunc);
    const auto emit = [&](const std::string &line) {
        std::cout << line << std::endl;
        if (report.is_open())
            report << line << std::endl;
    };

    int ran = 0, passed = 0;
    for (const auto &c : criteria)
    {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        Outcome o;
        try
        {
            o = c.run(ctx);
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("threw: ") + e.what()};
        }
        ++ran;
        passed += o.pass;
        emit((o.pass ? "PASS" : "FAIL") + std::string(" criterion ") + std::to_string(c.id) + ": " + o.detail);
    }
    emit(std::to_string(passed) + "/" + std::to_string(ran) + " criteria passed");
    return passed == ran ? 0 : 1;
}
