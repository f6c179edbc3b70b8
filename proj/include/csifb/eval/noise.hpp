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

#include <random>
#include <span>
#include <string>
#include <vector>

namespace csifb::eval
{
    using channel::CMatrix;
    using channel::PrecoderChannelMatrix;

    /// Per-sample SNR drawn uniformly in [snr_low_db, snr_high_db]. SNR is the
    /// sample's mean per-element power over the per-element noise variance.
    struct NoiseSpec
    {
        double snr_low_db = 0.0;
        double snr_high_db = 5.0;

        void validate() const;
        std::string label() const; // "0-5"

        // Parses "lo-hi" (dB), e.g. "5-10".
        static NoiseSpec parse(const std::string &text);
        // The 0-5, 5-10 and 10-15 dB ranges.
        static std::vector<NoiseSpec> presets();
    };

    // Adds circular complex Gaussian noise at a fixed SNR.
    CMatrix add_awgn(const CMatrix &h, double snr_db, std::mt19937_64 &rng);

    /// One SNR draw per sample, then add_awgn. Deterministic for a given rng state.
    std::vector<CMatrix> add_awgn(std::span<const PrecoderChannelMatrix> samples, const NoiseSpec &spec,
                                  std::mt19937_64 &rng);
}
