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

#include "csifb/nn/checkpoint.hpp"

#include "csifb/binary_io.hpp"

#include <algorithm>
#include <fstream>

namespace csifb::nn
{
    using detail::read_le;
    using detail::write_le;

    const CheckpointBlock *Checkpoint::find(const std::string &name) const
    {
        auto it = std::find_if(blocks.begin(), blocks.end(), [&](const CheckpointBlock &b) { return b.name == name; });
        return it == blocks.end() ? nullptr : &*it;
    }

    std::uint64_t fnv1a(std::string_view text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    template <typename T>
    void write_checkpoint(const std::filesystem::path &path, const CheckpointHeader &header,
                          const std::vector<NamedTensor<T>> &tensors)
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
        os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
        write_le(os, header.arch_hash);
        write_le(os, header.gamma);
        write_le(os, header.beta);
        write_le(os, header.n);
        write_le(os, header.k);
        write_le(os, static_cast<std::uint32_t>(tensors.size()));
        for (const auto &t : tensors)
        {
            write_le(os, static_cast<std::uint32_t>(t.name.size()));
            os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
            const auto &shape = t.tensor.shape();
            write_le(os, static_cast<std::uint32_t>(shape.size()));
            for (auto e : shape)
                write_le(os, static_cast<std::uint32_t>(e));
            for (auto v : t.tensor.data())
                write_le(os, static_cast<float>(v));
        }
        if (!os)
            throw std::runtime_error("failed writing checkpoint " + path.string());
    }

    Checkpoint read_checkpoint(const std::filesystem::path &path)
    {
        if (!std::filesystem::exists(path))
            throw MissingArtifact("checkpoint not found: " + path.string());
        std::ifstream is(path, std::ios::binary);
        char magic[8]{};
        if (!is.read(magic, sizeof(magic)))
            throw FormatError("truncated checkpoint header: " + path.string());
        if (!std::equal(std::begin(magic), std::end(magic), std::begin(kCheckpointMagic)))
            throw FormatError("not a checkpoint (bad magic/version): " + path.string());

        Checkpoint ckpt;
        ckpt.header.arch_hash = read_le<std::uint64_t>(is, "arch hash");
        ckpt.header.gamma = read_le<double>(is, "gamma");
        ckpt.header.beta = read_le<std::uint32_t>(is, "beta");
        ckpt.header.n = read_le<std::uint32_t>(is, "N");
        ckpt.header.k = read_le<std::uint32_t>(is, "K");
        const auto count = read_le<std::uint32_t>(is, "block count");
        for (std::uint32_t b = 0; b < count; ++b)
        {
            CheckpointBlock block;
            const auto len = read_le<std::uint32_t>(is, "block name length");
            if (len > 4096)
                throw FormatError("implausible block name length in " + path.string());
            block.name.resize(len);
            if (!is.read(block.name.data(), len))
                throw FormatError("truncated block name in " + path.string());
            const auto rank = read_le<std::uint32_t>(is, "block rank");
            if (rank == 0 || rank > 8)
                throw FormatError("implausible rank for block " + block.name);
            for (std::uint32_t r = 0; r < rank; ++r)
                block.shape.push_back(read_le<std::uint32_t>(is, "block extent"));
            const auto n = ad::shape_size(block.shape);
            block.values.resize(n);
            for (auto &v : block.values)
                v = read_le<float>(is, "block " + block.name);
            ckpt.blocks.push_back(std::move(block));
        }
        return ckpt;
    }

    template <typename T>
    void load_tensors(const Checkpoint &ckpt, const std::vector<NamedTensor<T>> &tensors)
    {
        for (const auto &t : tensors)
        {
            const auto *block = ckpt.find(t.name);
            if (!block)
                throw FormatError("checkpoint has no block named " + t.name);
            if (block->shape != t.tensor.shape())
                throw FormatError("checkpoint block " + t.name + " has shape " + ad::shape_string(block->shape) +
                                  ", model expects " + ad::shape_string(t.tensor.shape()));
            auto dst = const_cast<Tensor<T> &>(t.tensor).data();
            std::transform(block->values.begin(), block->values.end(), dst.begin(),
                           [](float v) { return static_cast<T>(v); });
        }
    }

    template void write_checkpoint<float>(const std::filesystem::path &, const CheckpointHeader &,
                                          const std::vector<NamedTensor<float>> &);
    template void write_checkpoint<double>(const std::filesystem::path &, const CheckpointHeader &,
                                           const std::vector<NamedTensor<double>> &);
    template void load_tensors<float>(const Checkpoint &, const std::vector<NamedTensor<float>> &);
    template void load_tensors<double>(const Checkpoint &, const std::vector<NamedTensor<double>> &);
}
