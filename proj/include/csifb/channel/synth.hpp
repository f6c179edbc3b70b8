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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace csifb::channel
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;

    /// Dual-polarized planar array: N1 x N2 ports per polarization, N = 2 N1 N2.
    /// Port index within one polarization is n1 * N2 + n2; the second polarization
    /// occupies rows N/2 .. N-1.
    struct AntennaConfig
    {
        int n1 = 16;
        int n2 = 1;

        int ports_per_polarization() const { return n1 * n2; }
        int ports() const { return 2 * n1 * n2; }
        void validate() const;
    };

    struct OfdmConfig
    {
        int rbs = 52;
        int subband_rb = 4;
        int subcarriers_per_rb = 12;
        double subcarrier_spacing_hz = 15e3;

        int subbands() const { return (rbs + subband_rb - 1) / subband_rb; }
        int subcarriers() const { return rbs * subcarriers_per_rb; }
        void validate() const;
    };

    /// Clustered multipath generator settings. Paths share one cluster centre
    /// azimuth and spread around it with a Laplacian of `angle_spread_deg`;
    /// delays are exponential with mean `delay_spread_s` and powers decay
    /// exponentially with delay under log-normal shadowing.
    struct ChannelConfig
    {
        AntennaConfig antenna;
        OfdmConfig ofdm;
        int n_rx = 4;
        int paths = 8;
        double angle_spread_deg = 15.0;
        double centre_azimuth_range_deg = 60.0;
        double zenith_spread_deg = 5.0;
        double delay_spread_s = 100e-9;
        double shadowing_db = 3.0;

        int n() const { return antenna.ports(); }
        int k() const { return ofdm.subbands(); }
        void validate() const;
    };

    struct Path
    {
        cdouble gain;
        double delay_s = 0.0;
        double azimuth_rad = 0.0;   // departure azimuth at the BS
        double zenith_rad = 0.0;    // departure zenith, pi/2 is broadside
        double rx_azimuth_rad = 0.0;
        double pol_phase_rad = 0.0; // phase of the second polarization relative to the first
    };

    /// Invariants: sum |gain|^2 == 1, delays >= 0.
    struct MultipathRealization
    {
        std::vector<Path> paths;

        void validate() const;
    };

    MultipathRealization draw_multipath(const ChannelConfig &cfg, std::mt19937_64 &rng);

    /// Transmit response of length N: the positional steering vector, then the
    /// same vector rotated by the path's polarization phase.
    CVector tx_steering(const AntennaConfig &antenna, double azimuth_rad, double zenith_rad, double pol_phase_rad);

    CVector rx_steering(int n_rx, double azimuth_rad);

    /// h(f) = sum_p g_p a_tx(p) a_rx(p)^H exp(-j 2 pi f tau_p), an N x N_r matrix.
    CMatrix channel_at(const ChannelConfig &cfg, const MultipathRealization &paths, double freq_hz);

    /// Channel on every subcarrier, index n at frequency n * spacing.
    std::vector<CMatrix> synthesize_channel(const ChannelConfig &cfg, const MultipathRealization &paths);

    // One channel per RB, sampled at the RB's centre subcarrier.
    std::vector<CMatrix> rb_channels(const ChannelConfig &cfg, const MultipathRealization &paths);

    /// Complex N x K matrix of per-subband dominant eigenvectors.
    ///
    /// Columns are unit norm and phase-canonical (first entry real and
    /// non-negative) when built through canonical(); wrap() keeps the data as
    /// given, which is what stored datasets need.
    class PrecoderChannelMatrix
    {
    public:
        PrecoderChannelMatrix() = default;

        static PrecoderChannelMatrix canonical(CMatrix h);
        static PrecoderChannelMatrix wrap(CMatrix h) { return PrecoderChannelMatrix(std::move(h)); }

        const CMatrix &matrix() const { return h_; }
        int n() const { return static_cast<int>(h_.rows()); }
        int k() const { return static_cast<int>(h_.cols()); }

        // Largest deviation from the unit-norm and canonical-phase invariants.
        double invariant_error() const;

        bool operator==(const PrecoderChannelMatrix &other) const { return h_ == other.h_; }

    private:
        explicit PrecoderChannelMatrix(CMatrix h) : h_(std::move(h)) {}
        CMatrix h_;
    };

    // Rotates v so its first nonzero entry is real and positive.
    void canonicalize_phase(CVector &v);

    struct Eigenpair
    {
        CVector vector;
        double value = 0.0;
    };

    /// Eigenvector of the largest eigenvalue of a Hermitian PSD matrix. The input
    /// is symmetrized first; the result is unit norm and phase-canonical.
    Eigenpair dominant_eigenvector(const CMatrix &r);

    /// Per subband k: R_k = (1/M) sum_{RB in k} h h^H, column k = dominant eigenvector of R_k.
    PrecoderChannelMatrix build_precoder_matrix(std::span<const CMatrix> rb_channels, const OfdmConfig &ofdm);

    // Deterministic per-sample seed derivation so samples do not depend on batch size.
    std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

    PrecoderChannelMatrix generate_sample(const ChannelConfig &cfg, std::uint64_t seed);

    std::vector<PrecoderChannelMatrix> generate_dataset(const ChannelConfig &cfg, std::uint64_t seed,
                                                        std::size_t count);
}
