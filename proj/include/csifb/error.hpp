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

#include <stdexcept>
#include <string>

namespace csifb
{
    // Shapes or extents that do not fit together.
    class DimensionError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // A caller broke a documented precondition (non-scalar loss, missing gradient, ...).
    class ContractError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // On-disk artifact is malformed: wrong magic, unsupported version, truncated payload.
    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // A file the caller relies on (dataset, checkpoint) does not exist.
    class MissingArtifact : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Training produced a non-finite loss.
    class DivergenceError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}
