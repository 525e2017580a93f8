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
#include <vector>

#include "rrsim/feedback.hpp"
#include "rrsim/phy.hpp"

namespace rrsim::pricing
{
    // Interference price of one victim toward one interfering cell, over the rank grid.
    struct PriceEntry
    {
        int victim = -1;
        int cell = -1;
        int iri = 0;               // I*
        int rank_min = 1;
        std::vector<double> loss;  // Delta T(L) >= 0 indexed by L - rank_min; loss(I*) = 0
        std::vector<double> price; // pi(L) = loss(L) / (L - I*), 0 at L = I*
        bool concave = true;       // loss nondecreasing in |L - I*| on both sides

        double price_at(int l) const { return price.at(l - rank_min); }
        double loss_at(int l) const { return loss.at(l - rank_min); }
    };

    struct PriceTable
    {
        std::vector<PriceEntry> entries;
        int concavity_violations = 0;
    };

    // Finite-difference prices from a loss curve.
    PriceEntry make_price_entry(int victim, int cell, int iri, int rank_min, std::span<const double> loss);

    // Prices from delta-CQI reports. reports[q] may be null; measurement_set[q] lists the cells to price.
    PriceTable compute_prices(std::span<const feedback::FeedbackReport *const> reports,
                              const std::vector<std::vector<int>> &measurement_set, const feedback::FeedbackConfig &cfg);

    // A victim currently scheduled in a neighbouring cell, as seen by the cell computing its surplus.
    struct VictimTerm
    {
        int iri = 0;           // the victim's I*
        double w_tilde = 0.0;  // effective weight w_s * pi(L) for the candidate rank L
    };

    // Pi = sum over victims of (L - I*) w~.
    double payment(int rank, std::span<const VictimTerm> victims);
    // Upsilon = w_q T - Pi.
    double surplus(double weight, double rate, int rank, std::span<const VictimTerm> victims);

    // (L - I*) w_s pi(L) for a victim described by its report; zero when L = I* or the cell is idle (L = 0).
    double payment_term(const feedback::FeedbackReport &victim, double w_s, int rank, const feedback::FeedbackConfig &cfg);

    // Small network for the centralized oracle: single channel matrix per (user, cell, subband).
    struct SmallInstance
    {
        int n_cells = 0;
        std::vector<int> serving;                          // per user
        std::vector<double> weight;                        // w_q
        std::vector<std::vector<std::vector<CMat>>> H;     // [user][cell][subband]
        std::vector<std::vector<double>> alpha;            // [user][cell]
        int n_subbands = 1;
        int rank_min = 1, rank_max = 2;
        double power = 1.0;
        double noise = 1.0;
        double rate_cap = 6.0;
        phy::ReceiverStrategy receiver = phy::ReceiverStrategy::mmse_irc_ideal;
        phy::Codebook codebook;
        int precoder_index = 0; // fixed codebook entry per rank

        std::vector<std::vector<int>> users_of_cell() const;
    };

    struct CellChoice
    {
        int user = -1;
        int rank = 0;
    };

    struct SubbandOptimum
    {
        std::vector<CellChoice> choice; // per cell
        double objective = 0.0;
    };

    // Rate of each cell's scheduled user under a full co-schedule on one subband.
    std::vector<double> profile_rates(const SmallInstance &inst, int subband, std::span<const CellChoice> choice);

    // Weighted sum-rate maximizer per subband by enumeration; lexicographic ties (cells in order,
    // users then ranks ascending). Throws std::invalid_argument beyond 3 cells, 4 users/cell,
    // 2 subbands or a 4-rank grid.
    std::vector<SubbandOptimum> centralized_exhaustive(const SmallInstance &inst, double tie_tolerance = 1e-12);

} // namespace rrsim::pricing
