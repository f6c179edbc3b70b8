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

#include <string>
#include <vector>

namespace csifb::codebook
{
    using channel::AntennaConfig;
    using channel::CMatrix;
    using channel::CVector;
    using channel::PrecoderChannelMatrix;

    enum class Scheme
    {
        rel15,
        rel16
    };

    std::string to_string(Scheme scheme);

    /// Oversampled 2-D DFT beam (m1, m2) over one polarization's N1 x N2 ports, unit norm.
    CVector dft_beam(const AntennaConfig &antenna, int o1, int o2, int m1, int m2);

    /// L orthogonal beams from one rotation group, shared by both polarizations.
    struct SdBasis
    {
        CMatrix beams; // (N/2) x L, orthonormal columns
        int o1 = 4;
        int o2 = 1;
        int q1 = 0;
        int q2 = 0;
        std::vector<int> group_indices; // i1 * N2 + i2 within the group, ascending
        std::vector<std::pair<int, int>> beam_indices; // (m1, m2) of each column

        int l() const { return static_cast<int>(beams.cols()); }
        // blockdiag(B, B)
        CMatrix w1() const;
    };

    /// Picks the rotation group and the L beams inside it that capture the most
    /// energy of H summed over subbands and polarizations. Ties go to the lowest index.
    SdBasis build_sd_basis(const AntennaConfig &antenna, int o1, int o2, int l, const PrecoderChannelMatrix &h);

    // Orthonormal DFT column f_m of length K: exp(j 2 pi k m / K) / sqrt(K).
    CVector fd_dft_column(int k, int m);

    struct FdBasis
    {
        CMatrix wf; // K x M
        std::vector<int> indices;

        int m() const { return static_cast<int>(wf.cols()); }
    };

    /// Chooses the M DFT columns maximizing ||W2 Wf||_F^2; exhaustive over subsets
    /// for K <= 16, greedy beyond.
    FdBasis select_fd_basis(const CMatrix &w2, int m);

    struct QuantConfig
    {
        bool enabled = true;
        int amplitude_bits = 3;
        int phase_bits = 3;
        // Rel-16 only: coefficients kept out of 2LM, strongest first. Negative keeps all.
        int retained = -1;
    };

    struct BitConfig
    {
        Scheme scheme = Scheme::rel15;
        AntennaConfig antenna;
        int o1 = 4;
        int o2 = 1;
        int l = 4;
        int m = 0; // FD basis size, rel16 only
        int k = 13;
        QuantConfig quant;
    };

    struct BitBreakdown
    {
        int rotation = 0;
        int beams = 0;
        int fd = 0;
        int bitmap = 0;
        int strongest = 0;
        int amplitude = 0;
        int phase = 0;

        int index_bits() const { return rotation + beams + fd + bitmap; }
        int total() const { return index_bits() + strongest + amplitude + phase; }
    };

    /// Feedback bits for a configuration:
    ///   rotation   ceil(log2(O1 O2))
    ///   beams      ceil(log2(C(N1 N2, L)))
    ///   fd         ceil(log2(C(K, M)))                      rel16
    ///   bitmap     2LM when fewer than 2LM coefficients kept  rel16
    ///   strongest  ceil(log2(#coefficients))
    ///   amplitude  amplitude_bits per non-reference coefficient (wideband)
    ///   phase      phase_bits per non-reference coefficient, per subband for rel15
    /// Unquantized configurations count 32 bits for each amplitude and phase field.
    BitBreakdown count_bits(const BitConfig &cfg);

    int ceil_log2(unsigned long long n);
    unsigned long long binomial(int n, int k);

    /// Amplitude grid with 2^bits levels: 0 and (1/sqrt 2)^j for j = 2^bits-2 .. 0.
    std::vector<double> amplitude_levels(int bits);
    double quantize_amplitude(double a, int bits);
    double quantize_phase(double phase_rad, int bits);

    struct CodebookReport
    {
        Scheme scheme = Scheme::rel15;
        int l = 0;
        int m = 0;
        int q1 = 0;
        int q2 = 0;
        std::vector<std::pair<int, int>> beam_indices;
        std::vector<int> fd_indices;
        CMatrix coefficients; // quantized W2 (2L x K) or C (2L x M)
        int strongest = 0;    // row of the reference coefficient (rel15) or flat index into C (rel16)
        BitBreakdown bits;
        int bit_count = 0;
        PrecoderChannelMatrix reconstruction;

        // "scheme=<s> L=<l> M=<m> bits=<b> nmse_db=<x> rho=<r>"
        std::string to_record(const PrecoderChannelMatrix &original) const;
    };

    /// W2 = W1^H H, quantized against the wideband-strongest coefficient, Hhat = W1 W2hat
    /// with unit columns (see reconstruct for the phase convention).
    CodebookReport rel15_compress(const PrecoderChannelMatrix &h, const SdBasis &basis, const QuantConfig &quant);

    /// C = W2 Wf, quantized against the strongest coefficient, Hhat = W1 Chat Wf^H.
    CodebookReport rel16_compress(const PrecoderChannelMatrix &h, const SdBasis &basis, const FdBasis &fd,
                                  const QuantConfig &quant);

    /// Basis selection plus compression in one call; m is ignored for rel15.
    CodebookReport compress(Scheme scheme, const PrecoderChannelMatrix &h, const AntennaConfig &antenna, int o1,
                            int o2, int l, int m, const QuantConfig &quant = {});

    /// Unit columns of W1 * coeffs, the codebook side of reconstruction. Quantized
    /// coefficients are relative to a reference coefficient, so their absolute
    /// column phase is lost and the result is phase-canonicalized to match the
    /// convention of H. Unquantized coefficients keep the phase of H and are only
    /// rescaled.
    PrecoderChannelMatrix reconstruct(const CMatrix &w1, const CMatrix &coeffs, bool canonical_phase = true);
}
