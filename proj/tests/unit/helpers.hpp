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

#include <algorithm>
#include <cmath>
#include <vector>

#include "rrsim/feedback.hpp"
#include "rrsim/phy.hpp"
#include "rrsim/rng.hpp"

namespace rrsim::test
{
    inline CMat random_matrix(Engine &rng, int rows, int cols, double variance = 1.0)
    {
        CMat m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                m(r, c) = complex_normal(rng, variance);
        return m;
    }

    // Random terminal view with n_blocks channel blocks mapped onto n_subbands subbands.
    inline feedback::TerminalView random_view(Engine &rng, int n, int n_interferers, int n_subbands, int blocks_per_subband,
                                              double noise, double interferer_gain)
    {
        feedback::TerminalView v;
        v.n_rx = n;
        v.n_tx = n;
        v.power = 1.0;
        v.noise = noise;
        const int nb = n_subbands * blocks_per_subband;
        for (int b = 0; b < nb; ++b)
            v.serving.push_back(random_matrix(rng, n, n));
        v.interferers.resize(n_interferers);
        for (int j = 0; j < n_interferers; ++j)
        {
            for (int b = 0; b < nb; ++b)
                v.interferers[j].push_back(random_matrix(rng, n, n));
            v.alpha_interferers.push_back(interferer_gain / (j + 1));
        }
        v.subbands = feedback::subband_blocks(n_subbands, blocks_per_subband, 1);
        return v;
    }

    // Explicit-route link rate for one block and one interferer-precoder draw.
    inline double oracle_block_rate(const feedback::TerminalView &v, int blk, const CMat &f, const std::vector<CMat> &fi,
                                    phy::ReceiverStrategy strategy, double cap)
    {
        phy::LinkState link;
        link.H = v.serving[blk];
        link.alpha = v.alpha_serving;
        link.power = v.power;
        link.F = f;
        link.noise = v.noise;
        for (int j = 0; j < v.n_interferers(); ++j)
            link.interferers.push_back({v.interferers[j][blk], v.alpha_interferers[j], v.power, fi[j]});
        return phy::link_rate(link, strategy, cap);
    }

    // Hand enumeration of the expected per-subband rate over the full product codebook at fixed interferer ranks.
    inline std::vector<double> oracle_expected_rate(const feedback::TerminalView &v, const CMat &f, const std::vector<int> &ranks,
                                                    const phy::Codebook &cb, phy::ReceiverStrategy strategy, double cap)
    {
        const int J = v.n_interferers();
        std::vector<std::vector<CMat>> draws{{}};
        for (int j = 0; j < J; ++j)
        {
            std::vector<std::vector<CMat>> next;
            for (const auto &d : draws)
                for (int c = 0; c < cb.size(ranks[j]); ++c)
                {
                    auto e = d;
                    e.push_back(cb.at(ranks[j], c));
                    next.push_back(std::move(e));
                }
            draws = std::move(next);
        }
        std::vector<double> out(v.n_subbands(), 0.0);
        for (int k = 0; k < v.n_subbands(); ++k)
            for (const auto &[b, w] : v.subbands[k])
            {
                double acc = 0.0;
                for (const auto &d : draws)
                    acc += oracle_block_rate(v, b, f, d, strategy, cap);
                out[k] += w * acc / static_cast<double>(draws.size());
            }
        return out;
    }

    struct OracleChoice
    {
        int serving_ri = 0, iri = 0;
        std::vector<int> pmi;
        std::vector<double> estimated;
        std::vector<double> score; // [(L - rank_min) * n_i + (I - rank_min)]
    };

    // Brute force over every (L, I, F) tuple: common interference rank, lowest rank then lowest index on ties.
    inline OracleChoice oracle_select(const feedback::TerminalView &v, const phy::Codebook &cb, int rank_min, int rank_max,
                                      phy::ReceiverStrategy strategy, double cap, double tol)
    {
        auto better = [tol](double a, double b) { return a > b + tol * std::max(1.0, std::abs(b)); };
        const int K = v.n_subbands(), J = v.n_interferers(), n = rank_max - rank_min + 1;
        OracleChoice best;
        double best_score = -1.0;
        best.score.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int L = rank_min; L <= rank_max; ++L)
            for (int I = rank_min; I <= rank_max; ++I)
            {
                std::vector<double> val(K, -1.0);
                std::vector<int> idx(K, -1);
                for (int c = 0; c < cb.size(L); ++c)
                {
                    const auto t = oracle_expected_rate(v, cb.at(L, c), std::vector<int>(J, I), cb, strategy, cap);
                    for (int k = 0; k < K; ++k)
                        if (idx[k] < 0 || better(t[k], val[k]))
                        {
                            val[k] = t[k];
                            idx[k] = c;
                        }
                }
                double s = 0.0;
                for (double x : val)
                    s += x;
                s /= K;
                best.score[static_cast<std::size_t>(L - rank_min) * n + (I - rank_min)] = s;
                if (best_score < 0.0 || better(s, best_score))
                {
                    best_score = s;
                    best.serving_ri = L;
                    best.iri = I;
                    best.pmi = idx;
                    best.estimated = val;
                }
            }
        return best;
    }

} // namespace rrsim::test
