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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "rrsim/common.hpp"

namespace rrsim
{
    using Engine = std::mt19937_64;

    // Tags that keep the random streams of different consumers disjoint.
    enum class Stream : std::uint64_t
    {
        layout = 0x11,
        shadowing = 0x12,
        channel = 0x21,
        innovation = 0x22,
        measurement = 0x23,
        draws = 0x31,
        drop = 0x41,
    };

    // SplitMix64 finalizer.
    constexpr std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Sub-seed for (master, stream, indices...). Every stream in the simulator is derived this way,
    // so a given (drop, subframe, user, cell) always sees the same numbers regardless of evaluation order.
    std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> indices = {});

    inline Engine make_engine(std::uint64_t master, Stream stream, std::initializer_list<std::uint64_t> indices = {})
    {
        return Engine(derive_seed(master, stream, indices));
    }

    // Circularly-symmetric complex Gaussian CN(0, variance).
    inline cdouble complex_normal(Engine &rng, double variance = 1.0)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    // FNV-1a over raw bytes; used for common-random-number checksums.
    class StreamChecksum
    {
    public:
        void add(const void *data, std::size_t n);
        void add(double v) { add(&v, sizeof v); }
        std::uint64_t value() const { return h_; }

    private:
        std::uint64_t h_ = 0xcbf29ce484222325ULL;
    };

} // namespace rrsim
