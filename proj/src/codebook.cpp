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

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "rrsim/phy.hpp"

namespace rrsim::phy
{
    Codebook build_codebook(int n_tx, int bits_per_rank)
    {
        if (n_tx != 2 && n_tx != 4 && n_tx != 8)
            throw ConfigError("unsupported n_tx for the codebook (expected 2, 4 or 8)");
        if (bits_per_rank < 0 || bits_per_rank > 8)
            throw ConfigError("codebook bits per rank must be in [0, 8]");
        const int n_entries = 1 << bits_per_rank;
        const double scale = 1.0 / std::sqrt(static_cast<double>(n_tx));

        CMat dft(n_tx, n_tx);
        for (int n = 0; n < n_tx; ++n)
            for (int k = 0; k < n_tx; ++k)
                dft(n, k) = std::polar(scale, 2.0 * std::numbers::pi * n * k / n_tx);

        Codebook cb;
        cb.n_tx = n_tx;
        cb.bits = bits_per_rank;
        cb.entries.resize(n_tx);
        for (int r = 1; r <= n_tx; ++r)
            for (int c = 0; c < n_entries; ++c)
            {
                CMat w(n_tx, r);
                for (int k = 0; k < r; ++k)
                {
                    const int col = (c + k) % n_tx;
                    for (int n = 0; n < n_tx; ++n)
                        w(n, k) = std::polar(1.0, 2.0 * std::numbers::pi * n * c / (n_tx * n_entries)) * dft(n, col);
                }
                cb.entries[r - 1].push_back(w);
            }
        return cb;
    }

    Codebook truncate_codebook(const Codebook &cb, int n)
    {
        Codebook out = cb;
        for (auto &v : out.entries)
            if (static_cast<int>(v.size()) > n)
                v.resize(n);
        return out;
    }

    std::string Codebook::dump() const
    {
        std::string s = "# rrsim codebook v1\nn_tx " + std::to_string(n_tx) + "\nbits " + std::to_string(bits) + "\n";
        char buf[96];
        for (int r = 1; r <= max_rank(); ++r)
            for (int c = 0; c < size(r); ++c)
            {
                s += "rank " + std::to_string(r) + " index " + std::to_string(c) + "\n";
                const CMat &w = at(r, c);
                for (int i = 0; i < w.rows(); ++i)
                {
                    for (int k = 0; k < w.cols(); ++k)
                    {
                        std::snprintf(buf, sizeof buf, "%s%.17g %.17g", k ? " " : "", w(i, k).real(), w(i, k).imag());
                        s += buf;
                    }
                    s += "\n";
                }
            }
        return s;
    }

    Codebook Codebook::load(std::string_view text)
    {
        std::istringstream in{std::string(text)};
        std::string line, tag;
        std::getline(in, line);
        if (line != "# rrsim codebook v1")
            throw std::runtime_error("codebook: bad header");
        Codebook cb;
        if (!(in >> tag >> cb.n_tx) || tag != "n_tx" || !(in >> tag >> cb.bits) || tag != "bits")
            throw std::runtime_error("codebook: missing n_tx/bits");
        if (cb.n_tx < 1 || cb.n_tx > kMaxAntennas)
            throw std::runtime_error("codebook: n_tx out of range");
        cb.entries.resize(cb.n_tx);
        int r = 0, c = 0;
        std::string t2;
        while (in >> tag)
        {
            if (tag != "rank" || !(in >> r >> t2 >> c) || t2 != "index" || r < 1 || r > cb.n_tx)
                throw std::runtime_error("codebook: bad entry header");
            if (c != static_cast<int>(cb.entries[r - 1].size()))
                throw std::runtime_error("codebook: entries out of order");
            CMat w(cb.n_tx, r);
            for (int i = 0; i < cb.n_tx; ++i)
                for (int k = 0; k < r; ++k)
                {
                    double re = 0.0, im = 0.0;
                    if (!(in >> re >> im))
                        throw std::runtime_error("codebook: truncated entry");
                    w(i, k) = {re, im};
                }
            cb.entries[r - 1].push_back(w);
        }
        return cb;
    }

} // namespace rrsim::phy
