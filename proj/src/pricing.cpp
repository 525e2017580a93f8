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

#include "rrsim/pricing.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace rrsim::pricing
{
    PriceEntry make_price_entry(int victim, int cell, int iri, int rank_min, std::span<const double> loss)
    {
        PriceEntry e;
        e.victim = victim;
        e.cell = cell;
        e.iri = iri;
        e.rank_min = rank_min;
        e.loss.assign(loss.begin(), loss.end());
        e.price.assign(loss.size(), 0.0);
        const int n = static_cast<int>(loss.size());
        for (int i = 0; i < n; ++i)
        {
            const int l = rank_min + i;
            if (l != iri)
                e.price[i] = loss[i] / (l - iri);
        }
        // loss should grow as L moves away from I*
        const int c = iri - rank_min;
        for (int i = c + 1; i < n; ++i)
            if (i - 1 >= 0 && loss[i] < loss[i - 1])
                e.concave = false;
        for (int i = c - 1; i >= 0; --i)
            if (i + 1 < n && loss[i] < loss[i + 1])
                e.concave = false;
        return e;
    }

    PriceTable compute_prices(std::span<const feedback::FeedbackReport *const> reports,
                              const std::vector<std::vector<int>> &measurement_set, const feedback::FeedbackConfig &cfg)
    {
        PriceTable t;
        for (std::size_t q = 0; q < reports.size(); ++q)
        {
            const auto *r = reports[q];
            if (!r || !r->rank_recommendation)
                continue;
            for (std::size_t j = 0; j < measurement_set[q].size(); ++j)
            {
                const int iri = r->per_cell_iri.empty() ? r->recommended_iri : r->per_cell_iri[j];
                std::vector<double> loss;
                for (int l = cfg.rank_min; l <= cfg.rank_max; ++l)
                    loss.push_back(feedback::delta_loss(*r, r->serving_ri, l, cfg));
                t.entries.push_back(make_price_entry(static_cast<int>(q), measurement_set[q][j], iri, cfg.rank_min, loss));
                if (!t.entries.back().concave)
                    ++t.concavity_violations;
            }
        }
        return t;
    }

    double payment(int rank, std::span<const VictimTerm> victims)
    {
        double pi = 0.0;
        for (const auto &v : victims)
            pi += (rank - v.iri) * v.w_tilde;
        return pi;
    }

    double surplus(double weight, double rate, int rank, std::span<const VictimTerm> victims)
    {
        return weight * rate - payment(rank, victims);
    }

    double payment_term(const feedback::FeedbackReport &victim, double w_s, int rank, const feedback::FeedbackConfig &cfg)
    {
        if (rank <= 0 || !victim.rank_recommendation || rank == victim.recommended_iri)
            return 0.0;
        const int d = rank - victim.recommended_iri;
        const double pi = feedback::delta_loss(victim, victim.serving_ri, rank, cfg) / d;
        return d * w_s * pi;
    }

    std::vector<std::vector<int>> SmallInstance::users_of_cell() const
    {
        std::vector<std::vector<int>> out(n_cells);
        for (std::size_t q = 0; q < serving.size(); ++q)
            out[serving[q]].push_back(static_cast<int>(q));
        return out;
    }

    std::vector<double> profile_rates(const SmallInstance &inst, int subband, std::span<const CellChoice> choice)
    {
        std::vector<double> rates(inst.n_cells, 0.0);
        for (int i = 0; i < inst.n_cells; ++i)
        {
            const int q = choice[i].user;
            if (q < 0)
                continue;
            phy::LinkState link;
            link.H = inst.H[q][i][subband];
            link.alpha = inst.alpha[q][i];
            link.power = inst.power;
            link.F = inst.codebook.at(choice[i].rank, inst.precoder_index);
            link.noise = inst.noise;
            for (int j = 0; j < inst.n_cells; ++j)
                if (j != i && choice[j].user >= 0 && inst.alpha[q][j] > 0.0)
                    link.interferers.push_back({inst.H[q][j][subband], inst.alpha[q][j], inst.power,
                                                inst.codebook.at(choice[j].rank, inst.precoder_index)});
            rates[i] = phy::link_rate(link, inst.receiver, inst.rate_cap);
        }
        return rates;
    }

    std::vector<SubbandOptimum> centralized_exhaustive(const SmallInstance &inst, double tie_tolerance)
    {
        const auto users = inst.users_of_cell();
        if (inst.n_cells < 1 || inst.n_cells > 3)
            throw std::invalid_argument("instance too large: at most 3 cells");
        for (const auto &u : users)
            if (u.empty() || u.size() > 4)
                throw std::invalid_argument("instance too large: 1 to 4 users per cell");
        if (inst.n_subbands < 1 || inst.n_subbands > 2)
            throw std::invalid_argument("instance too large: at most 2 subbands");
        const int nr = inst.rank_max - inst.rank_min + 1;
        if (nr < 1 || nr > 4)
            throw std::invalid_argument("instance too large: rank grid of at most 4");

        std::vector<SubbandOptimum> out;
        for (int k = 0; k < inst.n_subbands; ++k)
        {
            std::vector<int> digit(inst.n_cells, 0), radix(inst.n_cells);
            for (int i = 0; i < inst.n_cells; ++i)
                radix[i] = static_cast<int>(users[i].size()) * nr;
            SubbandOptimum best;
            bool have = false;
            std::vector<CellChoice> choice(inst.n_cells);
            for (;;)
            {
                for (int i = 0; i < inst.n_cells; ++i)
                    choice[i] = {users[i][digit[i] / nr], inst.rank_min + digit[i] % nr};
                const auto rates = profile_rates(inst, k, choice);
                double obj = 0.0;
                for (int i = 0; i < inst.n_cells; ++i)
                    obj += inst.weight[choice[i].user] * rates[i];
                if (!have || obj > best.objective + tie_tolerance * std::max(1.0, std::abs(best.objective)))
                {
                    best = {choice, obj};
                    have = true;
                }
                int i = inst.n_cells - 1;
                while (i >= 0 && ++digit[i] == radix[i])
                    digit[i--] = 0;
                if (i < 0)
                    break;
            }
            out.push_back(best);
        }
        return out;
    }

} // namespace rrsim::pricing
