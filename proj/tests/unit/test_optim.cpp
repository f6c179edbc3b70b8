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
#include "csifb/nn/checkpoint.hpp"
#include "csifb/nn/optim.hpp"
#include "csifb/ops.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace csifb;
using namespace csifb::nn;
using csifb::testing::random_tensor;

namespace
{
    std::filesystem::path temp_file(const std::string &name)
    {
        auto dir = std::filesystem::temp_directory_path() / "csifb_tests";
        std::filesystem::create_directories(dir);
        return dir / name;
    }

    // Reference schedule written out independently of the library.
    double reference_lr(double lo, double hi, int tw, int total, int t)
    {
        if (t <= tw)
            return lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(tw);
        return lo + 0.5 * (hi - lo) * (1.0 + std::cos(std::numbers::pi * (t - tw) / static_cast<double>(total - tw)));
    }
}

TEST_CASE("adam with zero gradients leaves parameters unchanged", "[adam]")
{
    std::mt19937_64 rng(1);
    auto w = random_tensor({5}, rng, -1, 1, true);
    const auto before = std::vector<double>(w.data().begin(), w.data().end());
    Adam<double> adam({w});
    for (int i = 0; i < 10; ++i)
    {
        w.ensure_grad();
        w.zero_grad();
        adam.step(0.1);
    }
    CHECK(std::vector<double>(w.data().begin(), w.data().end()) == before);
    CHECK(adam.steps() == 10);
}

TEST_CASE("first adam step with unit gradient moves by lr", "[adam]")
{
    Tensor<double> w({1}, 2.0, true);
    Adam<double> adam({w});
    w.ensure_grad()[0] = 1.0;
    adam.step(0.1);
    // m_hat = 1, v_hat = 1 -> step = lr / (1 + eps)
    CHECK(w[0] == Catch::Approx(2.0 - 0.1 / (1.0 + 1e-8)).epsilon(1e-14));
    CHECK(adam.first_moments()[0][0] == Catch::Approx(0.1));
    CHECK(adam.second_moments()[0][0] == Catch::Approx(0.001));
}

TEST_CASE("adam requires every gradient", "[adam]")
{
    Tensor<double> a({2}, 1.0, true), b({2}, 1.0, true);
    Adam<double> adam({a, b});
    a.ensure_grad();
    CHECK_THROWS_AS(adam.step(0.01), ContractError);
}

TEST_CASE("adam descends a quadratic bowl", "[adam]")
{
    std::mt19937_64 rng(5);
    auto w = random_tensor({6}, rng, -2, 2, true);
    Adam<double> adam({w});
    std::vector<double> norms;
    for (int i = 0; i < 200; ++i)
    {
        adam.zero_grad();
        Tape<double> tape;
        const auto loss = ad::sum(tape, ad::mul(tape, w, w));
        tape.backward(loss);
        adam.step(0.01);
        double n = 0.0;
        for (double v : w.data())
            n += v * v;
        norms.push_back(std::sqrt(n));
    }
    for (std::size_t i = 6; i < norms.size(); ++i)
        CHECK(norms[i] < norms[i - 1]);
}

TEST_CASE("warm-up cosine schedule examples", "[schedule]")
{
    const CosineWarmupSchedule s{1e-4, 1e-2, 30, 400};
    CHECK(s.lr(0) == 1e-4);
    CHECK(s.lr(30) == 1e-2);
    CHECK(s.lr(400) == Catch::Approx(1e-4).epsilon(1e-12));
    CHECK(s.lr(215) == Catch::Approx(5.05e-3).epsilon(1e-12));
    for (int t = 0; t <= 400; ++t)
        CHECK(s.lr(t) == Catch::Approx(reference_lr(1e-4, 1e-2, 30, 400, t)).epsilon(1e-12));
    CHECK_THROWS_AS(s.lr(-1), ContractError);
    CHECK_THROWS_AS(s.lr(401), ContractError);
    CHECK_THROWS_AS((CosineWarmupSchedule{1e-4, 1e-2, 400, 400}.lr(0)), ContractError);
    CHECK_THROWS_AS((CosineWarmupSchedule{1e-2, 1e-4, 30, 400}.lr(0)), ContractError);
}

TEST_CASE("schedule stays in range, is continuous at the peak and non-increasing after it", "[schedule]")
{
    const CosineWarmupSchedule s{1e-4, 1e-2, 30, 400};
    for (int t = 0; t <= 400; ++t)
    {
        CHECK(s.lr(t) >= 1e-4 - 1e-18);
        CHECK(s.lr(t) <= 1e-2);
    }
    // step sizes on either side of the peak are of the same (small) order
    CHECK(std::abs(s.lr(30) - s.lr(29)) < 1e-3);
    CHECK(std::abs(s.lr(31) - s.lr(30)) < 1e-3);
    for (int t = 31; t <= 400; ++t)
        CHECK(s.lr(t) <= s.lr(t - 1));
    for (int t = 1; t <= 30; ++t)
        CHECK(s.lr(t) > s.lr(t - 1));
}

TEST_CASE("checkpoint round trip", "[checkpoint]")
{
    std::mt19937_64 rng(3);
    std::vector<NamedTensor<double>> tensors{{"a.weight", random_tensor({2, 3, 1, 4}, rng)},
                                             {"a.bias", random_tensor({2}, rng)},
                                             {"b", random_tensor({7}, rng)}};
    const auto path = temp_file("roundtrip.ckpt");
    CheckpointHeader header{0x1234abcdULL, 0.125, 2, 32, 13};
    write_checkpoint(path, header, tensors);

    const auto ck = read_checkpoint(path);
    CHECK(ck.header.arch_hash == header.arch_hash);
    CHECK(ck.header.gamma == 0.125);
    CHECK(ck.header.beta == 2);
    CHECK(ck.header.n == 32);
    CHECK(ck.header.k == 13);
    REQUIRE(ck.blocks.size() == 3);
    CHECK(ck.find("a.weight")->shape == ad::Shape{2, 3, 1, 4});
    CHECK(ck.find("missing") == nullptr);

    std::vector<NamedTensor<double>> fresh{{"b", Tensor<double>({7})},
                                           {"a.bias", Tensor<double>({2})},
                                           {"a.weight", Tensor<double>({2, 3, 1, 4})}};
    load_tensors(ck, fresh);
    for (std::size_t i = 0; i < 7; ++i)
        CHECK(fresh[0].tensor[i] == static_cast<double>(static_cast<float>(tensors[2].tensor[i])));

    // file size follows the documented layout
    std::size_t expected = 8 + 8 + 8 + 4 * 3 + 4;
    for (const auto &t : tensors)
        expected += 4 + t.name.size() + 4 + 4 * t.tensor.rank() + 4 * t.tensor.size();
    CHECK(std::filesystem::file_size(path) == expected);

    std::vector<NamedTensor<double>> wrong{{"b", Tensor<double>({8})}};
    CHECK_THROWS_AS(load_tensors(ck, wrong), FormatError);
    std::vector<NamedTensor<double>> absent{{"zzz", Tensor<double>({1})}};
    CHECK_THROWS_AS(load_tensors(ck, absent), FormatError);
}

TEST_CASE("checkpoint reader rejects bad input", "[checkpoint]")
{
    CHECK_THROWS_AS(read_checkpoint(temp_file("does_not_exist.ckpt")), MissingArtifact);

    const auto bad = temp_file("bad_magic.ckpt");
    {
        std::ofstream os(bad, std::ios::binary);
        os << "NOTACKPT and then some bytes";
    }
    CHECK_THROWS_AS(read_checkpoint(bad), FormatError);

    std::mt19937_64 rng(4);
    const auto path = temp_file("truncated.ckpt");
    write_checkpoint<double>(path, CheckpointHeader{}, {{"x", random_tensor({50}, rng)}});
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 9);
    CHECK_THROWS_AS(read_checkpoint(path), FormatError);
}

TEST_CASE("fnv1a reference values", "[checkpoint]")
{
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}
