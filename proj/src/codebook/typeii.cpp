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

#include "csifb/codebook/typeii.hpp"

#include "csifb/error.hpp"
#include "csifb/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace csifb::codebook
{
    using channel::cdouble;
    using std::numbers::pi;

    std::string to_string(Scheme scheme)
    {
        return scheme == Scheme::rel15 ? "rel15" : "rel16";
    }

    int ceil_log2(unsigned long long n)
    {
        int bits = 0;
        while ((1ULL << bits) < n)
            ++bits;
        return bits;
    }

    unsigned long long binomial(int n, int k)
    {
        if (k < 0 || k > n)
            return 0;
        unsigned long long r = 1;
        for (int i = 1; i <= k; ++i)
            r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
        return r;
    }

    CVector dft_beam(const AntennaConfig &antenna, int o1, int o2, int m1, int m2)
    {
        const int half = antenna.ports_per_polarization();
        CVector v(half);
        const double s1 = 2.0 * pi * m1 / static_cast<double>(o1 * antenna.n1);
        const double s2 = 2.0 * pi * m2 / static_cast<double>(o2 * antenna.n2);
        for (int i1 = 0; i1 < antenna.n1; ++i1)
            for (int i2 = 0; i2 < antenna.n2; ++i2)
                v(i1 * antenna.n2 + i2) = std::polar(1.0, s1 * i1 + s2 * i2);
        return v / std::sqrt(static_cast<double>(half));
    }

    CMatrix SdBasis::w1() const
    {
        const auto half = beams.rows();
        const auto l = beams.cols();
        CMatrix w = CMatrix::Zero(2 * half, 2 * l);
        w.topLeftCorner(half, l) = beams;
        w.bottomRightCorner(half, l) = beams;
        return w;
    }

    SdBasis build_sd_basis(const AntennaConfig &antenna, int o1, int o2, int l, const PrecoderChannelMatrix &h)
    {
        antenna.validate();
        const int half = antenna.ports_per_polarization();
        if (o1 < 1 || o2 < 1)
            throw ConfigError("sd basis: oversampling factors must be >= 1");
        if (l < 1 || l > half)
            throw ConfigError("sd basis: L=" + std::to_string(l) + " outside [1, " + std::to_string(half) + "]");
        if (h.n() != 2 * half)
            throw DimensionError("sd basis: H has " + std::to_string(h.n()) + " rows, antenna has " +
                                 std::to_string(2 * half) + " ports");

        const CMatrix &hm = h.matrix();
        const auto upper = hm.topRows(half);
        const auto lower = hm.bottomRows(half);

        SdBasis best;
        double best_power = -1.0;
        for (int q1 = 0; q1 < o1; ++q1)
            for (int q2 = 0; q2 < o2; ++q2)
            {
                std::vector<double> power(static_cast<std::size_t>(half));
                for (int i1 = 0; i1 < antenna.n1; ++i1)
                    for (int i2 = 0; i2 < antenna.n2; ++i2)
                    {
                        const CVector b = dft_beam(antenna, o1, o2, o1 * i1 + q1, o2 * i2 + q2);
                        power[static_cast<std::size_t>(i1 * antenna.n2 + i2)] =
                            (b.adjoint() * upper).squaredNorm() + (b.adjoint() * lower).squaredNorm();
                    }
                std::vector<int> order(static_cast<std::size_t>(half));
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    return power[static_cast<std::size_t>(a)] > power[static_cast<std::size_t>(b)];
                });
                order.resize(static_cast<std::size_t>(l));
                double total = 0.0;
                for (int i : order)
                    total += power[static_cast<std::size_t>(i)];
                if (total > best_power)
                {
                    best_power = total;
                    std::sort(order.begin(), order.end());
                    best.o1 = o1;
                    best.o2 = o2;
                    best.q1 = q1;
                    best.q2 = q2;
                    best.group_indices = order;
                }
            }

        best.beams.resize(half, l);
        best.beam_indices.clear();
        for (int j = 0; j < l; ++j)
        {
            const int g = best.group_indices[static_cast<std::size_t>(j)];
            const int m1 = o1 * (g / antenna.n2) + best.q1;
            const int m2 = o2 * (g % antenna.n2) + best.q2;
            best.beams.col(j) = dft_beam(antenna, o1, o2, m1, m2);
            best.beam_indices.emplace_back(m1, m2);
        }
        return best;
    }

    CVector fd_dft_column(int k, int m)
    {
        CVector f(k);
        for (int i = 0; i < k; ++i)
            f(i) = std::polar(1.0 / std::sqrt(static_cast<double>(k)), 2.0 * pi * i * m / static_cast<double>(k));
        return f;
    }

    FdBasis select_fd_basis(const CMatrix &w2, int m)
    {
        const int k = static_cast<int>(w2.cols());
        if (m < 1 || m > k)
            throw ConfigError("fd basis: M=" + std::to_string(m) + " outside [1, K=" + std::to_string(k) + "]");

        std::vector<double> energy(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j)
            energy[static_cast<std::size_t>(j)] = (w2 * fd_dft_column(k, j)).squaredNorm();

        std::vector<int> chosen;
        if (k <= 16)
        {
            // Lexicographic enumeration of M-subsets; strict improvement keeps the first best.
            std::vector<int> subset(static_cast<std::size_t>(m));
            std::iota(subset.begin(), subset.end(), 0);
            double best = -1.0;
            while (true)
            {
                double e = 0.0;
                for (int j : subset)
                    e += energy[static_cast<std::size_t>(j)];
                if (e > best)
                {
                    best = e;
                    chosen = subset;
                }
                int pos = m - 1;
                while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == k - m + pos)
                    --pos;
                if (pos < 0)
                    break;
                ++subset[static_cast<std::size_t>(pos)];
                for (int j = pos + 1; j < m; ++j)
                    subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
        else
        {
            std::vector<bool> used(static_cast<std::size_t>(k), false);
            for (int step = 0; step < m; ++step)
            {
                int pick = -1;
                for (int j = 0; j < k; ++j)
                    if (!used[static_cast<std::size_t>(j)] &&
                        (pick < 0 || energy[static_cast<std::size_t>(j)] > energy[static_cast<std::size_t>(pick)]))
                        pick = j;
                used[static_cast<std::size_t>(pick)] = true;
                chosen.push_back(pick);
            }
            std::sort(chosen.begin(), chosen.end());
        }

        FdBasis fd;
        fd.indices = chosen;
        fd.wf.resize(k, m);
        for (int j = 0; j < m; ++j)
            fd.wf.col(j) = fd_dft_column(k, chosen[static_cast<std::size_t>(j)]);
        return fd;
    }

    BitBreakdown count_bits(const BitConfig &cfg)
    {
        const int half = cfg.antenna.ports_per_polarization();
        const int amp = cfg.quant.enabled ? cfg.quant.amplitude_bits : 32;
        const int phase = cfg.quant.enabled ? cfg.quant.phase_bits : 32;
        if (amp < 0 || phase < 0)
            throw ConfigError("bit config: negative field width");

        BitBreakdown b;
        b.rotation = ceil_log2(static_cast<unsigned long long>(cfg.o1) * static_cast<unsigned long long>(cfg.o2));
        b.beams = ceil_log2(binomial(half, cfg.l));
        if (cfg.scheme == Scheme::rel15)
        {
            const int coeffs = 2 * cfg.l;
            b.strongest = ceil_log2(static_cast<unsigned long long>(coeffs));
            b.amplitude = (coeffs - 1) * amp;
            b.phase = (coeffs - 1) * cfg.k * phase;
            return b;
        }

        const int total = 2 * cfg.l * cfg.m;
        const int kept = cfg.quant.retained < 0 ? total : std::min(cfg.quant.retained, total);
        b.fd = ceil_log2(binomial(cfg.k, cfg.m));
        b.bitmap = kept < total ? total : 0;
        if (kept == 0)
            return b;
        b.strongest = ceil_log2(static_cast<unsigned long long>(kept));
        b.amplitude = (kept - 1) * amp;
        b.phase = (kept - 1) * phase;
        return b;
    }

    std::vector<double> amplitude_levels(int bits)
    {
        if (bits < 1 || bits > 16)
            throw ConfigError("amplitude bits must lie in [1, 16]");
        const int n = 1 << bits;
        std::vector<double> levels{0.0};
        for (int j = n - 2; j >= 0; --j)
            levels.push_back(std::pow(std::sqrt(0.5), j));
        return levels;
    }

    double quantize_amplitude(double a, int bits)
    {
        const auto levels = amplitude_levels(bits);
        double best = levels.front();
        for (double v : levels)
            if (std::abs(v - a) < std::abs(best - a))
                best = v;
        return best;
    }

    double quantize_phase(double phase_rad, int bits)
    {
        if (bits < 1 || bits > 16)
            throw ConfigError("phase bits must lie in [1, 16]");
        const double n = static_cast<double>(1 << bits);
        const double step = 2.0 * pi / n;
        double idx = std::round(phase_rad / step);
        idx = std::fmod(std::fmod(idx, n) + n, n);
        return idx * step;
    }

    PrecoderChannelMatrix reconstruct(const CMatrix &w1, const CMatrix &coeffs, bool canonical_phase)
    {
        if (canonical_phase)
            return PrecoderChannelMatrix::canonical(w1 * coeffs);
        CMatrix h = w1 * coeffs;
        for (Eigen::Index k = 0; k < h.cols(); ++k)
        {
            const double n = h.col(k).norm();
            if (!(n > 0.0) || !std::isfinite(n))
                throw ContractError("codebook: reconstructed column " + std::to_string(k) + " is zero");
            h.col(k) /= n;
        }
        return PrecoderChannelMatrix::wrap(std::move(h));
    }

    namespace
    {
        cdouble quantized_ratio(cdouble value, cdouble reference, double amplitude, const QuantConfig &q)
        {
            const double phase = std::arg(value / reference);
            return std::polar(quantize_amplitude(amplitude, q.amplitude_bits), quantize_phase(phase, q.phase_bits));
        }

        void check_basis(const PrecoderChannelMatrix &h, const SdBasis &basis)
        {
            if (2 * basis.beams.rows() != h.n())
                throw DimensionError("codebook: basis built for " + std::to_string(2 * basis.beams.rows()) +
                                     " ports, H has " + std::to_string(h.n()));
        }
    }

    CodebookReport rel15_compress(const PrecoderChannelMatrix &h, const SdBasis &basis, const QuantConfig &quant)
    {
        check_basis(h, basis);
        const CMatrix w1 = basis.w1();
        const CMatrix w2 = w1.adjoint() * h.matrix();

        CodebookReport r;
        r.scheme = Scheme::rel15;
        r.l = basis.l();
        r.q1 = basis.q1;
        r.q2 = basis.q2;
        r.beam_indices = basis.beam_indices;

        AntennaConfig antenna;
        BitConfig bits{Scheme::rel15, antenna, basis.o1, basis.o2, basis.l(), 0, h.k(), quant};
        // Beam count only depends on the per-polarization port count.
        bits.antenna.n1 = static_cast<int>(basis.beams.rows());
        bits.antenna.n2 = 1;
        r.bits = count_bits(bits);
        r.bit_count = r.bits.total();

        if (!quant.enabled)
        {
            r.coefficients = w2;
            r.reconstruction = reconstruct(w1, w2, false);
            return r;
        }

        const Eigen::VectorXd row_energy = w2.rowwise().squaredNorm();
        Eigen::Index strongest = 0;
        for (Eigen::Index i = 1; i < row_energy.size(); ++i)
            if (row_energy(i) > row_energy(strongest))
                strongest = i;
        r.strongest = static_cast<int>(strongest);

        CMatrix q = CMatrix::Zero(w2.rows(), w2.cols());
        const double ref_energy = row_energy(strongest);
        for (Eigen::Index i = 0; i < w2.rows(); ++i)
        {
            const double wideband = ref_energy > 0.0 ? std::sqrt(row_energy(i) / ref_energy) : 0.0;
            for (Eigen::Index k = 0; k < w2.cols(); ++k)
            {
                if (i == strongest)
                    q(i, k) = 1.0;
                else if (std::abs(w2(strongest, k)) > 0.0)
                    q(i, k) = quantized_ratio(w2(i, k), w2(strongest, k), wideband, quant);
            }
        }
        r.coefficients = q;
        r.reconstruction = reconstruct(w1, q);
        return r;
    }

    CodebookReport rel16_compress(const PrecoderChannelMatrix &h, const SdBasis &basis, const FdBasis &fd,
                                  const QuantConfig &quant)
    {
        check_basis(h, basis);
        if (fd.wf.rows() != h.k())
            throw DimensionError("rel16: FD basis has " + std::to_string(fd.wf.rows()) + " rows, H has K=" +
                                 std::to_string(h.k()));
        if (fd.m() > h.k())
            throw ConfigError("rel16: M exceeds K");

        const CMatrix w1 = basis.w1();
        const CMatrix w2 = w1.adjoint() * h.matrix();
        const CMatrix c = w2 * fd.wf;

        CodebookReport r;
        r.scheme = Scheme::rel16;
        r.l = basis.l();
        r.m = fd.m();
        r.q1 = basis.q1;
        r.q2 = basis.q2;
        r.beam_indices = basis.beam_indices;
        r.fd_indices = fd.indices;

        BitConfig bits{Scheme::rel16, AntennaConfig{}, basis.o1, basis.o2, basis.l(), fd.m(), h.k(), quant};
        bits.antenna.n1 = static_cast<int>(basis.beams.rows());
        bits.antenna.n2 = 1;
        r.bits = count_bits(bits);
        r.bit_count = r.bits.total();

        if (!quant.enabled)
        {
            r.coefficients = c;
            r.reconstruction = reconstruct(w1, c * fd.wf.adjoint(), false);
            return r;
        }

        // Flat row-major index over C, strongest first, ties to the lower index.
        std::vector<int> order(static_cast<std::size_t>(c.size()));
        std::iota(order.begin(), order.end(), 0);
        const auto at = [&](int idx) { return c(idx / c.cols(), idx % c.cols()); };
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(at(a)) > std::abs(at(b)); });
        const int total = static_cast<int>(c.size());
        const int kept = quant.retained < 0 ? total : std::min(quant.retained, total);
        if (kept == 0)
            throw ConfigError("rel16: retaining zero coefficients leaves nothing to reconstruct");
        r.strongest = order.front();

        CMatrix q = CMatrix::Zero(c.rows(), c.cols());
        const cdouble ref = at(r.strongest);
        if (std::abs(ref) > 0.0)
            for (int j = 0; j < kept; ++j)
            {
                const int idx = order[static_cast<std::size_t>(j)];
                auto &dst = q(idx / c.cols(), idx % c.cols());
                dst = idx == r.strongest ? cdouble(1.0) : quantized_ratio(at(idx), ref, std::abs(at(idx)) / std::abs(ref), quant);
            }
        r.coefficients = q;
        r.reconstruction = reconstruct(w1, q * fd.wf.adjoint());
        return r;
    }

    std::string CodebookReport::to_record(const PrecoderChannelMatrix &original) const
    {
        std::ostringstream os;
        os << "scheme=" << to_string(scheme) << " L=" << l << " M=" << m << " bits=" << bit_count
           << " nmse_db=" << eval::format_db(eval::nmse(original, reconstruction).db)
           << " rho=" << eval::cosine_similarity(original, reconstruction);
        return os.str();
    }

    CodebookReport compress(Scheme scheme, const PrecoderChannelMatrix &h, const AntennaConfig &antenna, int o1,
                            int o2, int l, int m, const QuantConfig &quant)
    {
        const auto basis = build_sd_basis(antenna, o1, o2, l, h);
        if (scheme == Scheme::rel15)
            return rel15_compress(h, basis, quant);
        const CMatrix w2 = basis.w1().adjoint() * h.matrix();
        return rel16_compress(h, basis, select_fd_basis(w2, m), quant);
    }
}
