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

#include "csifb/channel/dataset.hpp"

#include "csifb/binary_io.hpp"
#include "csifb/error.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace csifb::channel
{
    using detail::read_le;
    using detail::write_le;

    std::size_t dataset_file_size(std::size_t n, std::size_t k, std::size_t count)
    {
        return kDatasetHeaderBytes + count * 2 * n * k * sizeof(float);
    }

    void write_dataset(const std::filesystem::path &path, std::span<const PrecoderChannelMatrix> samples)
    {
        const int n = samples.empty() ? 0 : samples.front().n();
        const int k = samples.empty() ? 0 : samples.front().k();
        for (const auto &s : samples)
            if (s.n() != n || s.k() != k)
                throw DimensionError("write_dataset: samples disagree on (N, K)");
        if (n > std::numeric_limits<std::uint16_t>::max() || k > std::numeric_limits<std::uint16_t>::max() ||
            samples.size() > std::numeric_limits<std::uint32_t>::max())
            throw DimensionError("write_dataset: dimensions exceed the header field widths");

        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open dataset for writing: " + path.string());
        os.write(kDatasetMagic, sizeof(kDatasetMagic));
        write_le(os, kDatasetVersion);
        write_le(os, static_cast<std::uint16_t>(n));
        write_le(os, static_cast<std::uint16_t>(k));
        write_le(os, static_cast<std::uint32_t>(samples.size()));
        for (const auto &s : samples)
        {
            const auto &h = s.matrix();
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < k; ++c)
                    write_le(os, static_cast<float>(h(r, c).real()));
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < k; ++c)
                    write_le(os, static_cast<float>(h(r, c).imag()));
        }
        if (!os)
            throw std::runtime_error("failed writing dataset " + path.string());
    }

    Dataset read_dataset(const std::filesystem::path &path)
    {
        if (!std::filesystem::exists(path))
            throw MissingArtifact("dataset not found: " + path.string());
        std::ifstream is(path, std::ios::binary);
        char magic[8]{};
        if (!is.read(magic, sizeof(magic)))
            throw FormatError("truncated dataset header: " + path.string());
        if (!std::equal(std::begin(magic), std::end(magic), std::begin(kDatasetMagic)))
            throw FormatError("not a dataset file (bad magic/version): " + path.string());

        Dataset ds;
        ds.meta.version = read_le<std::uint16_t>(is, "version");
        if (ds.meta.version != kDatasetVersion)
            throw FormatError("unsupported dataset version " + std::to_string(ds.meta.version));
        ds.meta.n = read_le<std::uint16_t>(is, "N");
        ds.meta.k = read_le<std::uint16_t>(is, "K");
        ds.meta.count = read_le<std::uint32_t>(is, "sample count");

        const auto n = ds.meta.n;
        const auto k = ds.meta.k;
        const auto expected = dataset_file_size(n, k, ds.meta.count);
        if (std::filesystem::file_size(path) < expected)
            throw FormatError("truncated dataset: " + path.string() + " is shorter than its header declares");

        ds.samples.reserve(ds.meta.count);
        std::vector<float> buf(2 * static_cast<std::size_t>(n) * k);
        for (std::uint32_t i = 0; i < ds.meta.count; ++i)
        {
            if (!is.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float))))
                throw FormatError("truncated dataset payload at sample " + std::to_string(i));
            if constexpr (std::endian::native == std::endian::big)
                for (auto &v : buf)
                    v = std::bit_cast<float>(detail::to_little(std::bit_cast<std::uint32_t>(v)));
            CMatrix h(n, k);
            const std::size_t plane = static_cast<std::size_t>(n) * k;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < k; ++c)
                {
                    const auto idx = static_cast<std::size_t>(r) * k + static_cast<std::size_t>(c);
                    h(r, c) = cdouble(buf[idx], buf[plane + idx]);
                }
            ds.samples.push_back(PrecoderChannelMatrix::wrap(std::move(h)));
        }
        return ds;
    }
}
