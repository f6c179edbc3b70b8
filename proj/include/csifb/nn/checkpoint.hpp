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

#include "csifb/nn/layers.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Model checkpoint file, all fields little-endian:
//
//   "PDNCKPT1"                  8 bytes magic
//   arch_hash                   u64
//   gamma                       f64
//   beta, N, K                  u32 each
//   block_count                 u32
//   block_count x {
//     name_length               u32
//     name                      name_length bytes, no terminator
//     rank                      u32
//     extents                   rank x u32
//     values                    prod(extents) x f32, row-major
//   }
namespace csifb::nn
{
    inline constexpr char kCheckpointMagic[8] = {'P', 'D', 'N', 'C', 'K', 'P', 'T', '1'};

    struct CheckpointHeader
    {
        std::uint64_t arch_hash = 0;
        double gamma = 0.0;
        std::uint32_t beta = 0;
        std::uint32_t n = 0;
        std::uint32_t k = 0;
    };

    struct CheckpointBlock
    {
        std::string name;
        Shape shape;
        std::vector<float> values;
    };

    struct Checkpoint
    {
        CheckpointHeader header;
        std::vector<CheckpointBlock> blocks;

        const CheckpointBlock *find(const std::string &name) const;
    };

    template <typename T>
    void write_checkpoint(const std::filesystem::path &path, const CheckpointHeader &header,
                          const std::vector<NamedTensor<T>> &tensors);

    // Throws MissingArtifact when absent, FormatError on bad magic or truncation.
    Checkpoint read_checkpoint(const std::filesystem::path &path);

    /// Copies every named tensor's values from the checkpoint. Missing names or
    /// shape disagreements raise FormatError.
    template <typename T>
    void load_tensors(const Checkpoint &ckpt, const std::vector<NamedTensor<T>> &tensors);

    // 64-bit FNV-1a.
    std::uint64_t fnv1a(std::string_view text);
}
