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

#include "csifb/error.hpp"
#include "csifb/eval/metrics.hpp"
#include "csifb/eval/noise.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace csifb;
using namespace csifb::eval;
using channel::cdouble;

namespace
{
    CMatrix random_complex(int rows, int cols, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g;
        CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = cdouble(g(rng), g(rng));
        return m;
    }

    PrecoderChannelMatrix random_h(std::mt19937_64 &rng, int n = 32, int k = 13)
    {
        return PrecoderChannelMatrix::canonical(random_complex(n, k, rng));
    }

    // Element loops, no Eigen reductions.
    double nmse_ref(const CMatrix &h, const CMatrix &hhat)
    {
        double num = 0.0, den = 0.0;
        for (int r = 0; r < h.rows(); ++r)
            for (int c = 0; c < h.cols(); ++c)
            {
                num += std::norm(hhat(r, c) - h(r, c));
                den += std::norm(h(r, c));
            }
        return num / den;
    }

    double rho_ref(const CMatrix &h, const CMatrix &hhat)
    {
        double acc = 0.0;
        for (int c = 0; c < h.cols(); ++c)
        {
            cdouble dot = 0.0;
            double a = 0.0, b = 0.0;
            for (int r = 0; r < h.rows(); ++r)
            {
                dot += std::conj(hhat(r, c)) * h(r, c);
                a += std::norm(hhat(r, c));
                b += std::norm(h(r, c));
            }
            acc += std::abs(dot) / std::sqrt(a * b);
        }
        return acc / static_cast<double>(h.cols());
    }
}

TEST_CASE("nmse trivial cases", "[nmse]")
{
    std::mt19937_64 rng(1);
    const auto h = random_h(rng);

    const auto same = nmse(h, h);
    CHECK(same.linear == 0.0);
    CHECK(std::isinf(same.db));
    CHECK(same.db < 0.0);
    CHECK(format_db(same.db) == "-inf");

    CHECK(nmse_sample(h.matrix(), CMatrix::Zero(32, 13)) == 1.0);
    CHECK(to_db(1.0) == 0.0);

    // (1 + eps) H - H = eps H
    const auto scaled = PrecoderChannelMatrix::wrap(h.matrix() * 1.1);
    const auto p = nmse(h, scaled);
    CHECK(p.linear == Catch::Approx(0.01).epsilon(1e-12));
    CHECK(p.db == Catch::Approx(-20.0).epsilon(1e-10));
}

TEST_CASE("nmse matches an element-loop reference", "[nmse]")
{
    std::mt19937_64 rng(2);
    std::vector<PrecoderChannelMatrix> a, b;
    double sum = 0.0;
    for (int i = 0; i < 20; ++i)
    {
        a.push_back(random_h(rng, 8, 5));
        b.push_back(random_h(rng, 8, 5));
        sum += nmse_ref(a.back().matrix(), b.back().matrix());
    }
    const auto r = nmse(a, b);
    CHECK(r.linear == Catch::Approx(sum / 20.0).epsilon(1e-12));
    CHECK(r.db == Catch::Approx(10.0 * std::log10(sum / 20.0)).epsilon(1e-12));
}

TEST_CASE("nmse errors", "[nmse]")
{
    std::mt19937_64 rng(3);
    const auto h = random_h(rng, 8, 4);
    CHECK_THROWS_AS(nmse_sample(CMatrix::Zero(8, 4), h.matrix()), ContractError);
    CHECK_THROWS_AS(nmse_sample(h.matrix(), CMatrix::Zero(8, 5)), DimensionError);
    std::vector<PrecoderChannelMatrix> one{h}, two{h, h};
    CHECK_THROWS_AS(nmse(one, two), DimensionError);
}

TEST_CASE("cosine similarity trivial cases", "[rho]")
{
    std::mt19937_64 rng(4);
    const auto h = random_h(rng);
    CHECK(cosine_similarity(h, h) == Catch::Approx(1.0).epsilon(1e-14));

    // Orthogonal columns: Gram-Schmidt a random vector against each h_k.
    CMatrix ortho = random_complex(32, 13, rng);
    for (int k = 0; k < 13; ++k)
    {
        const auto hk = h.matrix().col(k);
        ortho.col(k) -= hk * (hk.adjoint() * ortho.col(k))(0) / hk.squaredNorm();
    }
    CHECK(cosine_sample(h.matrix(), ortho) < 1e-14);

    CHECK_THROWS_AS(cosine_sample(h.matrix(), CMatrix::Zero(32, 13)), ContractError);
}

TEST_CASE("cosine similarity is invariant to per-column phase", "[rho]")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    double worst_identity = 0.0, worst_pair = 0.0, worst_nmse_gap = 0.0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        const auto h = random_h(rng, 8, 6);
        const auto other = random_h(rng, 8, 6);
        CMatrix rotated = h.matrix(), rotated_other = other.matrix();
        for (int k = 0; k < 6; ++k)
        {
            rotated.col(k) *= std::polar(1.0, angle(rng));
            rotated_other.col(k) *= std::polar(1.0, angle(rng));
        }
        worst_identity = std::max(worst_identity, std::abs(cosine_sample(h.matrix(), rotated) - 1.0));
        worst_pair = std::max(worst_pair, std::abs(cosine_sample(h.matrix(), rotated_other) -
                                                   cosine_sample(h.matrix(), other.matrix())));
        worst_nmse_gap = std::max(worst_nmse_gap, nmse_sample(h.matrix(), rotated));
    }
    CHECK(worst_identity < 1e-12);
    CHECK(worst_pair < 1e-12);
    // NMSE sees the rotation
    CHECK(worst_nmse_gap > 0.1);
}

TEST_CASE("cosine similarity matches an element-loop reference", "[rho]")
{
    std::mt19937_64 rng(6);
    std::vector<PrecoderChannelMatrix> a, b;
    double sum = 0.0;
    for (int i = 0; i < 20; ++i)
    {
        a.push_back(random_h(rng, 8, 5));
        b.push_back(PrecoderChannelMatrix::wrap(random_complex(8, 5, rng)));
        sum += rho_ref(a.back().matrix(), b.back().matrix());
    }
    const double rho = cosine_similarity(a, b);
    CHECK(rho == Catch::Approx(sum / 20.0).epsilon(1e-12));
    CHECK(rho >= 0.0);
    CHECK(rho <= 1.0);
}

TEST_CASE("db formatting", "[nmse]")
{
    CHECK(format_db(-3.14159265, 3) == "-3.142");
    CHECK(format_db(0.0, 2) == "0.00");
    CHECK(std::isinf(to_db(0.0)));
    CHECK(to_db(0.1) == Catch::Approx(-10.0));
}

TEST_CASE("awgn vanishes at very high snr", "[noise]")
{
    std::mt19937_64 rng(7), noise(8);
    std::vector<PrecoderChannelMatrix> samples;
    for (int i = 0; i < 20; ++i)
        samples.push_back(random_h(rng));
    const auto noisy = add_awgn(samples, NoiseSpec{300.0, 300.0}, noise);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        worst = std::max(worst, nmse_sample(samples[i].matrix(), noisy[i]));
    CHECK(10.0 * std::log10(worst) < -250.0);
}

TEST_CASE("awgn at 0 dB has unit relative power", "[noise]")
{
    std::mt19937_64 rng(9), noise(10);
    std::vector<PrecoderChannelMatrix> samples;
    for (int i = 0; i < 1000; ++i)
        samples.push_back(random_h(rng));
    const auto noisy = add_awgn(samples, NoiseSpec{0.0, 0.0}, noise);
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        sum += nmse_sample(samples[i].matrix(), noisy[i]);
    CHECK(std::abs(to_db(sum / 1000.0)) <= 0.5);
}

TEST_CASE("awgn snr scales the noise power", "[noise]")
{
    std::mt19937_64 rng(11);
    const auto h = random_h(rng);
    for (double snr : {-5.0, 3.0, 10.0, 20.0})
    {
        std::mt19937_64 noise(12);
        double sum = 0.0;
        for (int i = 0; i < 400; ++i)
            sum += nmse_sample(h.matrix(), add_awgn(h.matrix(), snr, noise));
        CHECK(to_db(sum / 400.0) == Catch::Approx(-snr).margin(0.3));
    }
}

TEST_CASE("awgn draws are deterministic per seed and stay in range", "[noise]")
{
    std::mt19937_64 rng(13);
    std::vector<PrecoderChannelMatrix> samples;
    for (int i = 0; i < 200; ++i)
        samples.push_back(random_h(rng, 8, 4));
    std::mt19937_64 a(5), b(5), c(6);
    const auto na = add_awgn(samples, NoiseSpec{5.0, 10.0}, a);
    const auto nb = add_awgn(samples, NoiseSpec{5.0, 10.0}, b);
    const auto nc = add_awgn(samples, NoiseSpec{5.0, 10.0}, c);
    for (std::size_t i = 0; i < samples.size(); ++i)
        REQUIRE(na[i] == nb[i]);
    CHECK_FALSE(na[0] == nc[0]);

    // A per-sample SNR in [5, 10] dB keeps the averaged relative noise inside [-10, -5] dB.
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        sum += nmse_sample(samples[i].matrix(), na[i]);
    const double db = to_db(sum / double(samples.size()));
    CHECK(db < -5.0);
    CHECK(db > -10.0);
}

TEST_CASE("noise presets and parsing", "[noise]")
{
    const auto presets = NoiseSpec::presets();
    REQUIRE(presets.size() == 3);
    CHECK(presets[0].label() == "0-5");
    CHECK(presets[1].label() == "5-10");
    CHECK(presets[2].label() == "10-15");
    for (const auto &p : presets)
    {
        CHECK_NOTHROW(p.validate());
        const auto back = NoiseSpec::parse(p.label());
        CHECK(back.snr_low_db == p.snr_low_db);
        CHECK(back.snr_high_db == p.snr_high_db);
    }
    const auto neg = NoiseSpec::parse("-5-0");
    CHECK(neg.snr_low_db == -5.0);
    CHECK(neg.snr_high_db == 0.0);
    CHECK_THROWS_AS(NoiseSpec::parse("10-5"), ConfigError);
    CHECK_THROWS_AS(NoiseSpec::parse("abc"), ConfigError);
    CHECK_THROWS_AS(NoiseSpec::parse("1-x"), ConfigError);
    CHECK_THROWS_AS((NoiseSpec{3.0, 1.0}.validate()), ConfigError);
}
