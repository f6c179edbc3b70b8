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

#include "csifb/channel/synth.hpp"

#include "csifb/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace csifb::channel
{
    using std::numbers::pi;

    void AntennaConfig::validate() const
    {
        if (n1 < 1 || n2 < 1)
            throw ConfigError("antenna: n1 and n2 must be >= 1");
    }

    void OfdmConfig::validate() const
    {
        if (rbs < 1 || subband_rb < 1 || subcarriers_per_rb < 1 || !(subcarrier_spacing_hz > 0.0))
            throw ConfigError("ofdm: rbs, subband_rb, subcarriers_per_rb and spacing must be positive");
    }

    void ChannelConfig::validate() const
    {
        antenna.validate();
        ofdm.validate();
        if (n_rx < 1)
            throw ConfigError("channel: n_rx must be >= 1");
        if (paths < 1)
            throw ConfigError("channel: paths must be >= 1");
        if (angle_spread_deg < 0.0 || delay_spread_s < 0.0 || shadowing_db < 0.0 || zenith_spread_deg < 0.0)
            throw ConfigError("channel: spreads must be non-negative");
    }

    void MultipathRealization::validate() const
    {
        if (paths.empty())
            throw ConfigError("multipath: no paths");
        double power = 0.0;
        for (const auto &p : paths)
        {
            if (p.delay_s < 0.0)
                throw ConfigError("multipath: negative delay");
            power += std::norm(p.gain);
        }
        if (std::abs(power - 1.0) > 1e-9)
            throw ConfigError("multipath: path powers must sum to 1, got " + std::to_string(power));
    }

    MultipathRealization draw_multipath(const ChannelConfig &cfg, std::mt19937_64 &rng)
    {
        cfg.validate();
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double deg = pi / 180.0;

        const double centre = (2.0 * unit(rng) - 1.0) * cfg.centre_azimuth_range_deg * deg;
        const double laplace_scale = cfg.angle_spread_deg * deg / std::sqrt(2.0);

        MultipathRealization r;
        r.paths.resize(static_cast<std::size_t>(cfg.paths));
        double total = 0.0;
        for (std::size_t i = 0; i < r.paths.size(); ++i)
        {
            auto &p = r.paths[i];
            const double u = unit(rng) - 0.5;
            const double offset = -laplace_scale * (u < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
            p.azimuth_rad = std::clamp(centre + offset, -pi / 2, pi / 2);
            p.zenith_rad = pi / 2 + cfg.zenith_spread_deg * deg * normal(rng);
            p.rx_azimuth_rad = (2.0 * unit(rng) - 1.0) * pi;
            p.pol_phase_rad = 2.0 * pi * unit(rng);
            // The first path defines the reference delay.
            p.delay_s = i == 0 ? 0.0 : -cfg.delay_spread_s * std::log(1.0 - unit(rng));
            const double decay = cfg.delay_spread_s > 0.0 ? std::exp(-p.delay_s / cfg.delay_spread_s) : 1.0;
            const double power = decay * std::pow(10.0, -cfg.shadowing_db * normal(rng) / 10.0);
            p.gain = std::polar(std::sqrt(power), 2.0 * pi * unit(rng));
            total += power;
        }
        for (auto &p : r.paths)
            p.gain /= std::sqrt(total);
        return r;
    }

    CVector tx_steering(const AntennaConfig &antenna, double azimuth_rad, double zenith_rad, double pol_phase_rad)
    {
        const int half = antenna.ports_per_polarization();
        CVector a(2 * half);
        const double h = pi * std::sin(zenith_rad) * std::sin(azimuth_rad);
        const double v = pi * std::cos(zenith_rad);
        const cdouble pol = std::polar(1.0, pol_phase_rad);
        for (int i1 = 0; i1 < antenna.n1; ++i1)
            for (int i2 = 0; i2 < antenna.n2; ++i2)
            {
                const int idx = i1 * antenna.n2 + i2;
                a(idx) = std::polar(1.0, h * i1 + v * i2);
                a(idx + half) = pol * a(idx);
            }
        return a;
    }

    CVector rx_steering(int n_rx, double azimuth_rad)
    {
        CVector a(n_rx);
        for (int m = 0; m < n_rx; ++m)
            a(m) = std::polar(1.0, pi * m * std::sin(azimuth_rad));
        return a;
    }

    CMatrix channel_at(const ChannelConfig &cfg, const MultipathRealization &paths, double freq_hz)
    {
        CMatrix h = CMatrix::Zero(cfg.n(), cfg.n_rx);
        for (const auto &p : paths.paths)
        {
            const cdouble w = p.gain * std::polar(1.0, -2.0 * pi * freq_hz * p.delay_s);
            h.noalias() += w * tx_steering(cfg.antenna, p.azimuth_rad, p.zenith_rad, p.pol_phase_rad) *
                           rx_steering(cfg.n_rx, p.rx_azimuth_rad).adjoint();
        }
        return h;
    }

    std::vector<CMatrix> synthesize_channel(const ChannelConfig &cfg, const MultipathRealization &paths)
    {
        cfg.validate();
        std::vector<CMatrix> out;
        out.reserve(static_cast<std::size_t>(cfg.ofdm.subcarriers()));
        for (int n = 0; n < cfg.ofdm.subcarriers(); ++n)
            out.push_back(channel_at(cfg, paths, n * cfg.ofdm.subcarrier_spacing_hz));
        return out;
    }

    std::vector<CMatrix> rb_channels(const ChannelConfig &cfg, const MultipathRealization &paths)
    {
        cfg.validate();
        std::vector<CMatrix> out;
        out.reserve(static_cast<std::size_t>(cfg.ofdm.rbs));
        for (int rb = 0; rb < cfg.ofdm.rbs; ++rb)
        {
            const int centre = rb * cfg.ofdm.subcarriers_per_rb + cfg.ofdm.subcarriers_per_rb / 2;
            out.push_back(channel_at(cfg, paths, centre * cfg.ofdm.subcarrier_spacing_hz));
        }
        return out;
    }

    void canonicalize_phase(CVector &v)
    {
        for (Eigen::Index i = 0; i < v.size(); ++i)
        {
            const double mag = std::abs(v(i));
            if (mag > 0.0)
            {
                v *= std::conj(v(i)) / mag;
                v(i) = cdouble(std::abs(v(i)), 0.0);
                return;
            }
        }
    }

    PrecoderChannelMatrix PrecoderChannelMatrix::canonical(CMatrix h)
    {
        for (Eigen::Index k = 0; k < h.cols(); ++k)
        {
            const double norm = h.col(k).norm();
            if (!(norm > 0.0) || !std::isfinite(norm))
                throw ContractError("precoder matrix column " + std::to_string(k) + " has zero or non-finite norm");
            CVector col = h.col(k) / norm;
            canonicalize_phase(col);
            h.col(k) = col;
        }
        return PrecoderChannelMatrix(std::move(h));
    }

    double PrecoderChannelMatrix::invariant_error() const
    {
        double err = 0.0;
        for (Eigen::Index k = 0; k < h_.cols(); ++k)
        {
            err = std::max(err, std::abs(h_.col(k).norm() - 1.0));
            if (h_.rows() > 0)
            {
                err = std::max(err, std::abs(h_(0, k).imag()));
                err = std::max(err, std::max(0.0, -h_(0, k).real()));
            }
        }
        return err;
    }

    Eigenpair dominant_eigenvector(const CMatrix &r)
    {
        if (r.rows() != r.cols() || r.rows() == 0)
            throw DimensionError("dominant_eigenvector: matrix must be square and non-empty");
        if (!r.allFinite())
            throw ContractError("dominant_eigenvector: non-finite entries");
        const CMatrix herm = 0.5 * (r + r.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
        if (solver.info() != Eigen::Success)
            throw ContractError("dominant_eigenvector: eigensolver did not converge");
        // Eigenvalues are sorted ascending.
        const auto last = herm.rows() - 1;
        Eigenpair out{solver.eigenvectors().col(last), solver.eigenvalues()(last)};
        out.vector.normalize();
        canonicalize_phase(out.vector);
        return out;
    }

    PrecoderChannelMatrix build_precoder_matrix(std::span<const CMatrix> rb_channels, const OfdmConfig &ofdm)
    {
        ofdm.validate();
        if (rb_channels.size() != static_cast<std::size_t>(ofdm.rbs))
            throw DimensionError("build_precoder_matrix: expected " + std::to_string(ofdm.rbs) + " RB channels, got " +
                                 std::to_string(rb_channels.size()));
        const auto n = rb_channels.front().rows();
        CMatrix h(n, ofdm.subbands());
        for (int k = 0; k < ofdm.subbands(); ++k)
        {
            const int first = k * ofdm.subband_rb;
            const int last = std::min(first + ofdm.subband_rb, ofdm.rbs);
            if (first >= last)
                throw ContractError("build_precoder_matrix: empty subband " + std::to_string(k));
            CMatrix cov = CMatrix::Zero(n, n);
            for (int rb = first; rb < last; ++rb)
            {
                const auto &hr = rb_channels[static_cast<std::size_t>(rb)];
                if (hr.rows() != n)
                    throw DimensionError("build_precoder_matrix: RB channels disagree on N");
                cov.noalias() += hr * hr.adjoint();
            }
            cov /= static_cast<double>(last - first);
            h.col(k) = dominant_eigenvector(cov).vector;
        }
        return PrecoderChannelMatrix::canonical(std::move(h));
    }

    std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index)
    {
        // splitmix64 over the pair.
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    PrecoderChannelMatrix generate_sample(const ChannelConfig &cfg, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        const auto paths = draw_multipath(cfg, rng);
        const auto rbs = rb_channels(cfg, paths);
        return build_precoder_matrix(rbs, cfg.ofdm);
    }

    std::vector<PrecoderChannelMatrix> generate_dataset(const ChannelConfig &cfg, std::uint64_t seed,
                                                        std::size_t count)
    {
        std::vector<PrecoderChannelMatrix> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(generate_sample(cfg, sample_seed(seed, i)));
        return out;
    }
}
