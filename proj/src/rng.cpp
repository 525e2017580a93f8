// SPDX-License-Identifier: Apache-2.0
//
// rrsim - rank-coordinated multi-cell MIMO-OFDMA system-level simulator
// Copyright (C) 2026 The rrsim Authors
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

#include "rrsim/rng.hpp"

namespace rrsim
{
    std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> indices)
    {
        std::uint64_t h = mix64(master ^ mix64(static_cast<std::uint64_t>(stream)));
        for (auto i : indices)
            h = mix64(h ^ mix64(i + 0x632BE59BD9B4E019ULL));
        return h;
    }

    void StreamChecksum::add(const void *data, std::size_t n)
    {
        const auto *p = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < n; ++i)
        {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }

} // namespace rrsim
