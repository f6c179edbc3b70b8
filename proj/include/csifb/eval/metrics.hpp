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

#include <span>
#include <string>

namespace csifb::eval
{
    using channel::CMatrix;
    using channel::PrecoderChannelMatrix;

    struct Nmse
    {
        double linear = 0.0;
        double db = 0.0; // -infinity for an exact reconstruction
    };

    // 10 log10(x), -infinity at 0.
    double to_db(double linear);
    // Decimal text of a dB value; -infinity prints as "-inf".
    std::string format_db(double db, int precision = 4);

    // ||Hhat - H||_F^2 / ||H||_F^2 for one sample. Throws on zero-norm H.
    double nmse_sample(const CMatrix &h, const CMatrix &hhat);

    // (1/K) sum_k |hhat_k^H h_k| / (||hhat_k|| ||h_k||) for one sample. Throws on a zero column.
    double cosine_sample(const CMatrix &h, const CMatrix &hhat);

    /// Mean NMSE over paired samples.
    Nmse nmse(std::span<const PrecoderChannelMatrix> h, std::span<const PrecoderChannelMatrix> hhat);
    Nmse nmse(const PrecoderChannelMatrix &h, const PrecoderChannelMatrix &hhat);

    /// Mean cosine similarity rho over paired samples.
    double cosine_similarity(std::span<const PrecoderChannelMatrix> h, std::span<const PrecoderChannelMatrix> hhat);
    double cosine_similarity(const PrecoderChannelMatrix &h, const PrecoderChannelMatrix &hhat);
}
