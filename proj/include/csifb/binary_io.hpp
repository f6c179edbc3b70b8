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

#include "csifb/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

// Little-endian scalar I/O shared by the dataset and checkpoint formats.
namespace csifb::detail
{
    template <typename U>
    U to_little(U v)
    {
        static_assert(std::is_integral_v<U>);
        if constexpr (std::endian::native == std::endian::big)
        {
            U r = 0;
            for (std::size_t i = 0; i < sizeof(U); ++i)
                r = static_cast<U>((r << 8) | ((v >> (8 * i)) & 0xFF));
            return r;
        }
        return v;
    }

    template <typename V>
    void write_le(std::ostream &os, V value)
    {
        if constexpr (std::is_floating_point_v<V>)
        {
            using U = std::conditional_t<sizeof(V) == 4, std::uint32_t, std::uint64_t>;
            write_le(os, std::bit_cast<U>(value));
        }
        else
        {
            const auto le = to_little(value);
            os.write(reinterpret_cast<const char *>(&le), sizeof(le));
        }
    }

    template <typename V>
    V read_le(std::istream &is, const std::string &what)
    {
        if constexpr (std::is_floating_point_v<V>)
        {
            using U = std::conditional_t<sizeof(V) == 4, std::uint32_t, std::uint64_t>;
            return std::bit_cast<V>(read_le<U>(is, what));
        }
        else
        {
            V raw{};
            if (!is.read(reinterpret_cast<char *>(&raw), sizeof(raw)))
                throw FormatError("truncated file while reading " + what);
            return to_little(raw);
        }
    }
}
