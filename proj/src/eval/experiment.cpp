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

#include "csifb/eval/experiment.hpp"

#include "csifb/channel/dataset.hpp"
#include "csifb/codebook/typeii.hpp"
#include "csifb/error.hpp"
#include "csifb/eval/metrics.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

namespace csifb::eval
{
    namespace
    {
        namespace fs = std::filesystem;
        namespace pt = boost::property_tree;

        // One INI section. Every key read is remembered; finish() rejects the rest.
        class Section
        {
        public:
            Section(std::string name, const pt::ptree *tree) : name_(std::move(name)), tree_(tree) {}

            template <typename V>
            V get(const std::string &key, V fallback)
            {
                known_.insert(key);
                const auto text = raw(key);
                return text ? parse<V>(key, *text) : fallback;
            }

            std::optional<std::string> raw(const std::string &key)
            {
                known_.insert(key);
                if (!tree_)
                    return std::nullopt;
                auto it = tree_->find(key);
                if (it == tree_->not_found())
                    return std::nullopt;
                return boost::algorithm::trim_copy(it->second.data());
            }

            bool has(const std::string &key) { return raw(key).has_value(); }

            void finish() const
            {
                if (!tree_)
                    return;
                for (const auto &[key, value] : *tree_)
                    if (!known_.count(key))
                        throw ConfigError("unknown key \"" + key + "\" in [" + name_ + "]");
            }

        private:
            template <typename V>
            V parse(const std::string &key, const std::string &text) const
            {
                if constexpr (std::is_same_v<V, bool>)
                {
                    const auto t = boost::algorithm::to_lower_copy(text);
                    if (t == "true" || t == "yes" || t == "1")
                        return true;
                    if (t == "false" || t == "no" || t == "0")
                        return false;
                    throw ConfigError("[" + name_ + "] " + key + ": expected a boolean, got \"" + text + "\"");
                }
                else if constexpr (std::is_same_v<V, std::string>)
                {
                    return text;
                }
                else
                {
                    std::istringstream in(text);
                    V v{};
                    in >> v;
                    if (!in || !(in >> std::ws).eof() || (std::is_unsigned_v<V> && text.starts_with('-')))
                        throw ConfigError("[" + name_ + "] " + key + ": cannot parse \"" + text + "\"");
                    return v;
                }
            }

            std::string name_;
            const pt::ptree *tree_;
            std::set<std::string> known_;
        };

        class IniFile
        {
        public:
            explicit IniFile(const fs::path &path) : base_(path.parent_path())
            {
                if (!fs::exists(path))
                    throw ConfigError("config not found: " + path.string());
                try
                {
                    pt::read_ini(path.string(), tree_);
                }
                catch (const pt::ini_parser_error &e)
                {
                    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
                }
                for (const auto &[key, value] : tree_)
                    if (value.empty() && !value.data().empty())
                        throw ConfigError("key \"" + key + "\" outside any section in " + path.string());
            }

            Section section(const std::string &name) const
            {
                auto it = tree_.find(name);
                return Section(name, it == tree_.not_found() ? nullptr : &it->second);
            }

            const pt::ptree &tree() const { return tree_; }

            void only(const std::set<std::string> &names, const std::string &prefix = {}) const
            {
                for (const auto &[key, value] : tree_)
                    if (!names.count(key) && (prefix.empty() || !key.starts_with(prefix)))
                        throw ConfigError("unknown section [" + key + "]");
            }

            fs::path resolve(const std::string &text) const
            {
                fs::path p(text);
                return (p.is_relative() ? base_ / p : p).lexically_normal();
            }

        private:
            fs::path base_;
            pt::ptree tree_;
        };

        std::vector<NoiseSpec> parse_noise_list(const std::string &text)
        {
            std::vector<std::string> parts;
            boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
            std::vector<NoiseSpec> specs;
            for (auto &p : parts)
            {
                boost::algorithm::trim(p);
                if (p.empty())
                    continue;
                if (p == "presets")
                {
                    for (const auto &s : NoiseSpec::presets())
                        specs.push_back(s);
                    continue;
                }
                specs.push_back(NoiseSpec::parse(p));
            }
            return specs;
        }

        std::string fixed(double v, int precision = 6)
        {
            if (std::isinf(v) && v < 0)
                return "-inf";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", precision, v);
            return buf;
        }

        void write_text(const fs::path &path, const std::string &text)
        {
            std::ofstream f(path, std::ios::binary);
            f << text;
            if (!f)
                throw std::runtime_error("cannot write " + path.string());
        }

        std::string gamma_label(double gamma)
        {
            const double inv = 1.0 / gamma;
            if (std::abs(inv - std::round(inv)) < 1e-9)
                return "1/" + std::to_string(static_cast<long>(std::round(inv)));
            std::ostringstream os;
            os << gamma;
            return os.str();
        }

        using Reconstructor = std::function<std::vector<PrecoderChannelMatrix>(std::span<const CMatrix>)>;

        struct Arm
        {
            std::string name;
            std::string scheme;
            std::string params;
            int bits = 0;
            Reconstructor run;
        };

        std::vector<Arm> build_arms(const ExperimentConfig &cfg, int n, int k)
        {
            std::vector<Arm> arms;
            for (const auto &spec : cfg.arms)
            {
                Arm arm;
                arm.name = spec.name;
                arm.scheme = to_string(spec.kind);
                if (spec.kind == ArmKind::autoencoder)
                {
                    if (!fs::exists(spec.checkpoint))
                        throw MissingArtifact("arm " + spec.name + ": checkpoint not found: " + spec.checkpoint.string());
                    auto net = std::make_shared<model::PolarDenseNet<float>>(
                        model::PolarDenseNet<float>::load(spec.checkpoint));
                    const auto &mc = net->config();
                    if (mc.n != n || mc.k != k)
                        throw ConfigError("arm " + spec.name + ": checkpoint is for N=" + std::to_string(mc.n) +
                                          ", K=" + std::to_string(mc.k) + " but the dataset has N=" +
                                          std::to_string(n) + ", K=" + std::to_string(k));
                    arm.params = "gamma=" + gamma_label(mc.gamma) + " beta=" + std::to_string(mc.beta);
                    arm.bits = mc.feedback_bits();
                    arm.run = [net](std::span<const CMatrix> inputs) { return model::reconstruct(*net, inputs); };
                }
                else
                {
                    if (cfg.antenna.ports() != n)
                        throw ConfigError("arm " + spec.name + ": n1=" + std::to_string(cfg.antenna.n1) +
                                          ", n2=" + std::to_string(cfg.antenna.n2) + " gives " +
                                          std::to_string(cfg.antenna.ports()) + " ports but the dataset has N=" +
                                          std::to_string(n));
                    const auto scheme = spec.kind == ArmKind::rel15 ? codebook::Scheme::rel15 : codebook::Scheme::rel16;
                    codebook::BitConfig bc;
                    bc.scheme = scheme;
                    bc.antenna = cfg.antenna;
                    bc.o1 = cfg.o1;
                    bc.o2 = cfg.o2;
                    bc.l = spec.l;
                    bc.m = scheme == codebook::Scheme::rel16 ? spec.m : 0;
                    bc.k = k;
                    arm.bits = codebook::count_bits(bc).total();
                    arm.params = "L=" + std::to_string(spec.l);
                    if (scheme == codebook::Scheme::rel16)
                        arm.params += " M=" + std::to_string(spec.m);
                    arm.run = [scheme, spec, antenna = cfg.antenna, o1 = cfg.o1,
                               o2 = cfg.o2](std::span<const CMatrix> inputs) {
                        std::vector<PrecoderChannelMatrix> out;
                        out.reserve(inputs.size());
                        for (const auto &x : inputs)
                            out.push_back(codebook::compress(scheme, PrecoderChannelMatrix::wrap(x), antenna, o1, o2,
                                                             spec.l, spec.m)
                                              .reconstruction);
                        return out;
                    };
                }
                arms.push_back(std::move(arm));
            }
            return arms;
        }

        void add_heatmap(std::vector<HeatmapCell> &cells, const std::string &source, const CMatrix &m)
        {
            for (int r = 0; r < m.rows(); ++r)
                for (int c = 0; c < m.cols(); ++c)
                    cells.push_back({source, r, c, std::abs(m(r, c))});
        }

        std::vector<CMatrix> matrices(std::span<const PrecoderChannelMatrix> samples)
        {
            std::vector<CMatrix> out;
            out.reserve(samples.size());
            for (const auto &s : samples)
                out.push_back(s.matrix());
            return out;
        }

        std::vector<PrecoderChannelMatrix> load_slice(const ExperimentConfig &cfg)
        {
            auto ds = channel::read_dataset(cfg.dataset);
            const std::size_t total = ds.samples.size();
            if (cfg.first_sample >= total)
                throw ConfigError("first_sample " + std::to_string(cfg.first_sample) + " is beyond the " +
                                  std::to_string(total) + " samples of " + cfg.dataset.string());
            const std::size_t count = cfg.samples ? cfg.samples : total - cfg.first_sample;
            if (cfg.first_sample + count > total)
                throw ConfigError("requested samples [" + std::to_string(cfg.first_sample) + ", " +
                                  std::to_string(cfg.first_sample + count) + ") exceed the " + std::to_string(total) +
                                  " samples of " + cfg.dataset.string());
            return {ds.samples.begin() + static_cast<std::ptrdiff_t>(cfg.first_sample),
                    ds.samples.begin() + static_cast<std::ptrdiff_t>(cfg.first_sample + count)};
        }
    }

    std::string to_string(ArmKind kind)
    {
        switch (kind)
        {
        case ArmKind::rel15:
            return "rel15";
        case ArmKind::rel16:
            return "rel16";
        case ArmKind::autoencoder:
            return "polardensenet";
        }
        return "?";
    }

    GenerateConfig GenerateConfig::load(const std::filesystem::path &path)
    {
        IniFile ini(path);
        ini.only({"generate", "channel"});
        GenerateConfig cfg;
        auto g = ini.section("generate");
        cfg.count = g.get<std::size_t>("count", cfg.count);
        cfg.seed = g.get<std::uint64_t>("seed", cfg.seed);
        g.finish();

        auto c = ini.section("channel");
        auto &ch = cfg.channel;
        ch.antenna.n1 = c.get("n1", ch.antenna.n1);
        ch.antenna.n2 = c.get("n2", ch.antenna.n2);
        ch.ofdm.rbs = c.get("rbs", ch.ofdm.rbs);
        ch.ofdm.subband_rb = c.get("subband_rb", ch.ofdm.subband_rb);
        ch.ofdm.subcarriers_per_rb = c.get("subcarriers_per_rb", ch.ofdm.subcarriers_per_rb);
        ch.ofdm.subcarrier_spacing_hz = c.get("subcarrier_spacing_hz", ch.ofdm.subcarrier_spacing_hz);
        ch.n_rx = c.get("n_rx", ch.n_rx);
        ch.paths = c.get("paths", ch.paths);
        ch.angle_spread_deg = c.get("angle_spread_deg", ch.angle_spread_deg);
        ch.centre_azimuth_range_deg = c.get("centre_azimuth_range_deg", ch.centre_azimuth_range_deg);
        ch.zenith_spread_deg = c.get("zenith_spread_deg", ch.zenith_spread_deg);
        ch.delay_spread_s = c.get("delay_spread_s", ch.delay_spread_s);
        ch.shadowing_db = c.get("shadowing_db", ch.shadowing_db);
        c.finish();

        if (cfg.count < 1)
            throw ConfigError("[generate] count must be >= 1");
        ch.validate();
        return cfg;
    }

    std::filesystem::path run_generate(const GenerateConfig &cfg, const std::filesystem::path &out)
    {
        cfg.channel.validate();
        const auto samples = channel::generate_dataset(cfg.channel, cfg.seed, cfg.count);
        std::filesystem::create_directories(out);
        const auto path = out / "dataset.bin";
        channel::write_dataset(path, samples);
        return path;
    }

    TrainConfig TrainConfig::load(const std::filesystem::path &path)
    {
        IniFile ini(path);
        ini.only({"train", "model"});
        TrainConfig cfg;
        auto t = ini.section("train");
        const auto dataset = t.raw("dataset");
        if (!dataset)
            throw ConfigError("[train] dataset is required");
        cfg.dataset = ini.resolve(*dataset);
        cfg.train_samples = t.get("train_samples", cfg.train_samples);
        cfg.val_samples = t.get("val_samples", cfg.val_samples);
        auto &h = cfg.hyper;
        h.epochs = t.get("epochs", h.epochs);
        h.batch_size = t.get("batch_size", h.batch_size);
        h.lr_max = t.get("lr_max", h.lr_max);
        h.lr_min = t.get("lr_min", h.lr_min);
        h.warmup = t.get("warmup", h.warmup);
        h.seed = t.get<std::uint64_t>("seed", h.seed);
        if (const auto noise = t.raw("noise"); noise && !noise->empty() && *noise != "none")
            h.noise = NoiseSpec::parse(*noise);
        t.finish();

        auto m = ini.section("model");
        auto &mc = cfg.model;
        if (m.has("inverse_gamma"))
        {
            if (m.has("gamma"))
                throw ConfigError("[model] give inverse_gamma or gamma, not both");
            mc = model::PolarDenseNetConfig::preset(m.get("inverse_gamma", 8));
        }
        mc.gamma = m.get("gamma", mc.gamma);
        mc.latent_dim = m.get("latent_dim", mc.latent_dim);
        mc.beta = m.get("beta", mc.beta);
        mc.path_channels = m.get("path_channels", mc.path_channels);
        mc.dense_block_layers = m.get("dense_block_layers", mc.dense_block_layers);
        mc.growth_channels = m.get("growth_channels", mc.growth_channels);
        mc.decoder_blocks = m.get("decoder_blocks", mc.decoder_blocks);
        mc.shared_paths = m.get("shared_paths", mc.shared_paths);
        mc.quantize = m.get("quantize", mc.quantize);
        m.finish();

        if (cfg.train_samples < 2 || cfg.val_samples < 1)
            throw ConfigError("[train] need train_samples >= 2 and val_samples >= 1");
        return cfg;
    }

    TrainOutcome run_train(const TrainConfig &cfg, const std::filesystem::path &out,
                           const model::EpochCallback &on_epoch)
    {
        const auto ds = channel::read_dataset(cfg.dataset);
        if (cfg.train_samples + cfg.val_samples > ds.samples.size())
            throw ConfigError("train_samples + val_samples = " + std::to_string(cfg.train_samples + cfg.val_samples) +
                              " exceeds the " + std::to_string(ds.samples.size()) + " samples of " +
                              cfg.dataset.string());
        auto mc = cfg.model;
        mc.n = ds.meta.n;
        mc.k = ds.meta.k;
        mc.validate();

        const std::span<const PrecoderChannelMatrix> all(ds.samples);
        const auto train_set = all.subspan(0, cfg.train_samples);
        const auto val_set = all.subspan(cfg.train_samples, cfg.val_samples);

        model::PolarDenseNet<float> net(mc, cfg.hyper.seed);
        TrainOutcome outcome;
        outcome.training = model::train(net, train_set, val_set, cfg.hyper, on_epoch);
        outcome.validation = model::evaluate(net, val_set);

        std::filesystem::create_directories(out);
        outcome.checkpoint = out / "model.ckpt";
        outcome.history = out / "history.csv";
        net.save(outcome.checkpoint);
        outcome.training.write_csv(outcome.history);
        return outcome;
    }

    void ExperimentConfig::validate() const
    {
        antenna.validate();
        if (o1 < 1 || o2 < 1)
            throw ConfigError("[experiment] o1 and o2 must be >= 1");
        if (noise_draws < 1)
            throw ConfigError("[experiment] noise_draws must be >= 1");
        for (const auto &n : noise)
            n.validate();
        std::set<std::string> names;
        for (const auto &arm : arms)
        {
            if (!names.insert(arm.name).second)
                throw ConfigError("duplicate arm " + arm.name);
            if (arm.kind != ArmKind::autoencoder && (arm.l < 1 || arm.l > antenna.ports_per_polarization()))
                throw ConfigError("arm " + arm.name + ": L must lie in [1, N1 N2]");
            if (arm.kind == ArmKind::rel16 && arm.m < 1)
                throw ConfigError("arm " + arm.name + ": M must be >= 1");
            if (arm.kind == ArmKind::autoencoder && arm.checkpoint.empty())
                throw ConfigError("arm " + arm.name + ": checkpoint is required");
        }
    }

    ExperimentConfig ExperimentConfig::load(const std::filesystem::path &path)
    {
        IniFile ini(path);
        ini.only({"experiment"}, "arm.");
        ExperimentConfig cfg;
        auto e = ini.section("experiment");
        const auto dataset = e.raw("dataset");
        if (!dataset)
            throw ConfigError("[experiment] dataset is required");
        cfg.dataset = ini.resolve(*dataset);
        cfg.first_sample = e.get("first_sample", cfg.first_sample);
        cfg.samples = e.get("samples", cfg.samples);
        cfg.heatmap_sample = e.get("heatmap_sample", cfg.heatmap_sample);
        cfg.seed = e.get<std::uint64_t>("seed", cfg.seed);
        if (const auto noise = e.raw("noise"))
            cfg.noise = parse_noise_list(*noise);
        cfg.noise_draws = e.get("noise_draws", cfg.noise_draws);
        cfg.antenna.n1 = e.get("n1", cfg.antenna.n1);
        cfg.antenna.n2 = e.get("n2", cfg.antenna.n2);
        cfg.o1 = e.get("o1", cfg.o1);
        cfg.o2 = e.get("o2", cfg.o2);
        e.finish();

        for (const auto &[key, value] : ini.tree())
        {
            if (!key.starts_with("arm."))
                continue;
            ArmSpec arm;
            arm.name = key.substr(4);
            if (arm.name.empty())
                throw ConfigError("arm section needs a name: [arm.<name>]");
            auto s = ini.section(key);
            const auto scheme = s.get<std::string>("scheme", "");
            if (scheme == "rel15")
                arm.kind = ArmKind::rel15;
            else if (scheme == "rel16")
                arm.kind = ArmKind::rel16;
            else if (scheme == "polardensenet")
                arm.kind = ArmKind::autoencoder;
            else
                throw ConfigError("[" + key + "] scheme must be rel15, rel16 or polardensenet, got \"" + scheme + "\"");
            if (arm.kind == ArmKind::autoencoder)
            {
                if (const auto ckpt = s.raw("checkpoint"))
                    arm.checkpoint = ini.resolve(*ckpt);
            }
            else
            {
                arm.l = s.get("l", arm.l);
                if (arm.kind == ArmKind::rel16)
                    arm.m = s.get("m", arm.m);
            }
            s.finish();
            cfg.arms.push_back(std::move(arm));
        }
        cfg.validate();
        return cfg;
    }

    std::string metrics_header() { return "scheme,params,bits,nmse_db,rho,n_samples"; }

    std::string metrics_row(const MetricsRecord &r)
    {
        return r.scheme + "," + r.params + "," + std::to_string(r.bits) + "," + fixed(r.nmse_db) + "," + fixed(r.rho) +
               "," + std::to_string(r.n_samples);
    }

    std::string ExperimentResult::metrics_csv() const
    {
        std::string s = metrics_header() + "\n";
        for (const auto &r : metrics)
            s += metrics_row(r) + "\n";
        return s;
    }

    std::string ExperimentResult::noise_csv() const
    {
        std::string s = "arm,noise,rho,nmse_db\n";
        for (const auto &r : noise)
            s += r.arm + "," + r.noise + "," + fixed(r.rho) + "," + fixed(r.nmse_db) + "\n";
        return s;
    }

    std::string ExperimentResult::heatmap_csv() const
    {
        std::string s = "source,row,col,magnitude\n";
        for (const auto &c : heatmap)
            s += c.source + "," + std::to_string(c.row) + "," + std::to_string(c.col) + "," + fixed(c.magnitude, 8) +
                 "\n";
        return s;
    }

    ExperimentResult run_experiment(const ExperimentConfig &cfg, std::span<const PrecoderChannelMatrix> samples)
    {
        cfg.validate();
        ExperimentResult result;
        if (cfg.arms.empty())
            return result;
        if (samples.empty())
            throw ConfigError("experiment: no samples to evaluate");
        if (cfg.heatmap_sample >= samples.size())
            throw ConfigError("heatmap_sample " + std::to_string(cfg.heatmap_sample) + " is outside the " +
                              std::to_string(samples.size()) + " evaluated samples");

        const int n = samples[0].n(), k = samples[0].k();
        const auto arms = build_arms(cfg, n, k);
        const auto clean = matrices(samples);

        // The heatmap sample is reconstructed on its own, exactly as inspect does it,
        // since float batches may round differently from a batch of one.
        const std::vector<CMatrix> one{clean[cfg.heatmap_sample]};
        add_heatmap(result.heatmap, "H", samples[cfg.heatmap_sample].matrix());
        for (const auto &arm : arms)
        {
            const auto rec = arm.run(clean);
            const auto e = nmse(samples, rec);
            const double rho = cosine_similarity(samples, rec);
            result.metrics.push_back({arm.scheme, arm.params, arm.bits, e.linear, e.db, rho, samples.size()});
            result.noise.push_back({arm.name, "clean", rho, e.db});
            add_heatmap(result.heatmap, arm.name, arm.run(one)[0].matrix());
        }

        for (std::size_t p = 0; p < cfg.noise.size(); ++p)
        {
            std::vector<double> rho(arms.size(), 0.0), err(arms.size(), 0.0);
            for (int d = 0; d < cfg.noise_draws; ++d)
            {
                std::mt19937_64 rng(channel::sample_seed(channel::sample_seed(cfg.seed, p + 1),
                                                         static_cast<std::uint64_t>(d)));
                const auto noisy = add_awgn(samples, cfg.noise[p], rng);
                for (std::size_t a = 0; a < arms.size(); ++a)
                {
                    const auto rec = arms[a].run(noisy);
                    rho[a] += cosine_similarity(samples, rec);
                    err[a] += nmse(samples, rec).linear;
                }
            }
            for (std::size_t a = 0; a < arms.size(); ++a)
                result.noise.push_back({arms[a].name, cfg.noise[p].label(), rho[a] / cfg.noise_draws,
                                        to_db(err[a] / cfg.noise_draws)});
        }
        return result;
    }

    ExperimentResult run_experiment(const ExperimentConfig &cfg, const std::filesystem::path &out)
    {
        cfg.validate();
        ExperimentResult result;
        if (!cfg.arms.empty())
        {
            const auto samples = load_slice(cfg);
            result = run_experiment(cfg, std::span<const PrecoderChannelMatrix>(samples));
        }
        std::filesystem::create_directories(out);
        write_text(out / "metrics.csv", result.metrics_csv());
        write_text(out / "rho_bars.csv", result.noise_csv());
        write_text(out / "heatmap.csv", result.heatmap_csv());
        return result;
    }

    ExperimentResult run_inspect(const ExperimentConfig &cfg, std::size_t sample, const std::filesystem::path &out)
    {
        cfg.validate();
        const auto ds = channel::read_dataset(cfg.dataset);
        if (sample >= ds.samples.size())
            throw ConfigError("sample " + std::to_string(sample) + " is outside the " +
                              std::to_string(ds.samples.size()) + " samples of " + cfg.dataset.string());
        const auto &h = ds.samples[sample];
        ExperimentResult result;
        add_heatmap(result.heatmap, "H", h.matrix());
        const std::vector<CMatrix> one{h.matrix()};
        for (const auto &arm : build_arms(cfg, h.n(), h.k()))
            add_heatmap(result.heatmap, arm.name, arm.run(one)[0].matrix());
        std::filesystem::create_directories(out);
        write_text(out / "heatmap.csv", result.heatmap_csv());
        return result;
    }
}
