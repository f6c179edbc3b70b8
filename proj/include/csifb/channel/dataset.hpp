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

#include <cstdint>
#include <filesystem>
#include <vector>

// Dataset file, little-endian:
//
//   "CSIDSET1"      8 bytes magic
//   version         u16 (currently 1)
//   N, K            u16 each
//   sample_count    u32
//   per sample      2*N*K f32: real plane then imaginary plane, each row-major N x K
namespace csifb::channel
{
    inline constexpr char kDatasetMagic[8] = {'C', 'S', 'I', 'D', 'S', 'E', 'T', '1'};
    inline constexpr std::uint16_t kDatasetVersion = 1;
    inline constexpr std::size_t kDatasetHeaderBytes = 8 + 2 + 2 + 2 + 4;

    struct DatasetMeta
    {
        std::uint16_t version = kDatasetVersion;
        std::uint16_t n = 0;
        std::uint16_t k = 0;
        std::uint32_t count = 0;
    };

    struct Dataset
    {
        DatasetMeta meta;
        std::vector<PrecoderChannelMatrix> samples;
    };

    std::size_t dataset_file_size(std::size_t n, std::size_t k, std::size_t count);

    // All samples must share one (N, K).
    void write_dataset(const std::filesystem::path &path, std::span<const PrecoderChannelMatrix> samples);

    // Samples are returned exactly as stored (32-bit values widened to double).
    Dataset read_dataset(const std::filesystem::path &path);
}
