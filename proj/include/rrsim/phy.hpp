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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrsim/common.hpp"

namespace rrsim::phy
{
    // Precoders shared by all cells. entries[r-1][c] is the N_t x r matrix of rank r, index c.
    // Construction: W = Phi_c * D(:, {(c + k) mod N_t : k < r}) with D the unitary DFT matrix and
    // Phi_c = diag(exp(j 2 pi n c / (N_t 2^bits))), an oversampling phase ramp.
    struct Codebook
    {
        int n_tx = 0;
        int bits = 0;
        std::vector<std::vector<CMat>> entries;

        int max_rank() const { return static_cast<int>(entries.size()); }
        int size(int rank) const { return static_cast<int>(entries.at(rank - 1).size()); }
        const CMat &at(int rank, int index) const { return entries.at(rank - 1).at(index); }

        // Text format: "# rrsim codebook v1", "n_tx N", "bits B", then per entry a line "rank r index c"
        // followed by N_t lines of r "re im" pairs.
        std::string dump() const;
        static Codebook load(std::string_view text);
    };

    Codebook build_codebook(int n_tx, int bits_per_rank);

    // Keeps only the first `n` entries of each rank (small oracle instances).
    Codebook truncate_codebook(const Codebook &cb, int n);

    enum class ReceiverStrategy
    {
        mmse_irc_ideal,     // knows the actual interferer precoders
        mmse_irc_simplified // assumes identity precoders in the interfering cells
    };

    struct InterfererLink
    {
        CMat H;             // N_r x N_t
        double alpha = 1.0; // large-scale gain
        double power = 1.0; // E_{s,j}
        CMat F;             // N_t x L_j precoder actually used
    };

    struct LinkState
    {
        CMat H;
        double alpha = 1.0;
        double power = 1.0;
        CMat F; // N_t x L
        std::vector<InterfererLink> interferers;
        double noise = 1.0; // white noise plus unmodeled interference
        int rank() const { return static_cast<int>(F.cols()); }
    };

    struct ReceiveFilter
    {
        CMat G; // L x N_r
        ReceiverStrategy strategy = ReceiverStrategy::mmse_irc_ideal;
        bool ill_conditioned = false;
        double condition = 1.0;
    };

    // Effective noise level used when inverting a covariance: max(sigma^2, 1e-12 tr(R)/N_r).
    double regularization_floor(double noise, double trace, int n_rx);

    // Interference-plus-noise covariance seen by the filter for the given strategy (floor applied).
    CMat interference_covariance(const LinkState &link, ReceiverStrategy strategy);

    // G = (alpha_s E_s / L) F^H H^H R^{-1}, R = (alpha_s E_s / L) H F F^H H^H + R_ici + floor I.
    ReceiveFilter mmse_filter(const LinkState &link, ReceiverStrategy strategy, double ill_threshold = 1e12);

    // Per-stream SINR of any filter against the link's actual interference, including intra-cell
    // inter-stream leakage in the denominator.
    std::vector<double> per_stream_sinr(const LinkState &link, const ReceiveFilter &filter);

    // Sum over streams of min(log2(1 + rho), cap).
    double achievable_rate(std::span<const double> rho, double cap = 6.0);

    // mmse_filter + per_stream_sinr + achievable_rate.
    double link_rate(const LinkState &link, ReceiverStrategy strategy, double cap = 6.0);

    // Closed-form per-stream SINR of the exact MMSE filter: 1/[(I + s Y^H Y)^{-1}]_mm - 1 with
    // Y = C^{-1} H F, Q = C C^H the interference-plus-noise covariance and s = alpha_s E_s / L.
    std::vector<double> mmse_sinr_closed_form(const CMat &q, const CMat &h, const CMat &f, double s);

} // namespace rrsim::phy
