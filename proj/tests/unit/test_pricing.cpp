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

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "rrsim/pricing.hpp"

using namespace rrsim;
using namespace rrsim::pricing;
using namespace rrsim::test;

namespace
{
    SmallInstance random_instance(Engine &rng, int cells, int users_per_cell, int n, double cross)
    {
        SmallInstance s;
        s.n_cells = cells;
        s.n_subbands = 2;
        s.rank_min = 1;
        s.rank_max = 2;
        s.noise = 0.05;
        s.codebook = phy::build_codebook(n, 2);
        const int U = cells * users_per_cell;
        for (int q = 0; q < U; ++q)
        {
            s.serving.push_back(q / users_per_cell);
            s.weight.push_back(0.5 + 0.25 * (q % 3));
            s.H.emplace_back();
            s.alpha.emplace_back();
            for (int c = 0; c < cells; ++c)
            {
                s.H[q].emplace_back();
                for (int k = 0; k < s.n_subbands; ++k)
                    s.H[q][c].push_back(random_matrix(rng, n, n));
                s.alpha[q].push_back(c == s.serving[q] ? 1.0 : cross);
            }
        }
        return s;
    }
} // namespace

TEST_CASE("insensitive victim has zero prices", "[pricing]")
{
    const std::vector<double> loss{0.0, 0.0, 0.0, 0.0};
    const auto e = make_price_entry(0, 1, 2, 1, loss);
    for (double p : e.price)
        CHECK(p == 0.0);
    CHECK(e.concave);
}

TEST_CASE("one-step finite difference gives the price", "[pricing]")
{
    const std::vector<double> loss{0.0, 0.5, 0.9, 1.2};
    const auto e = make_price_entry(0, 1, 1, 1, loss);
    CHECK(e.price_at(2) == 0.5);
    CHECK(e.price_at(3) == Catch::Approx(0.45));
    CHECK(e.price_at(1) == 0.0);
    CHECK(e.concave);
    const std::vector<double> bumpy{0.0, 0.5, 0.2, 1.2};
    CHECK_FALSE(make_price_entry(0, 1, 1, 1, bumpy).concave);
}

TEST_CASE("prices agree with a direct recomputation of the victim's rates", "[pricing][oracle]")
{
    Engine rng(30);
    const auto cb = truncate_codebook(phy::build_codebook(2, 2), 2);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto v = random_view(rng, 2, 1, 2, 1, 0.05, 2.0);
        feedback::FeedbackConfig cfg;
        cfg.rank_max = 2;
        const auto r = feedback::select_ranks_and_precoders(v, cb, cfg, 1);
        const auto o = oracle_select(v, cb, 1, 2, cfg.receiver, cfg.rate_cap, cfg.tie_tolerance);
        // unquantized loss curve at the victim's serving rank
        std::vector<double> loss;
        for (int l = 1; l <= 2; ++l)
            loss.push_back(r.best_score() - r.score[static_cast<std::size_t>(r.serving_ri - 1) * r.n_profiles + (l - 1)]);
        const auto e = make_price_entry(0, 1, r.recommended_iri, 1, loss);
        for (int l = 1; l <= 2; ++l)
        {
            if (l == r.recommended_iri)
                continue;
            const double t_opt = o.score[static_cast<std::size_t>(o.serving_ri - 1) * 2 + (o.iri - 1)];
            const double t_l = o.score[static_cast<std::size_t>(o.serving_ri - 1) * 2 + (l - 1)];
            CHECK(e.price_at(l) == Catch::Approx((t_opt - t_l) / (l - o.iri)).epsilon(1e-9).margin(1e-12));
        }
    }
}

TEST_CASE("prices from reports use the quantized delta-CQI", "[pricing]")
{
    feedback::FeedbackConfig cfg;
    cfg.rank_max = 2;
    feedback::FeedbackReport r;
    r.rank_recommendation = true;
    r.serving_ri = 1;
    r.recommended_iri = 1;
    r.n_profiles = 2;
    r.profiles = {{1}, {2}};
    r.score = {3.0, 2.0, 2.5, 1.0};
    r.delta_cqi = {0, 1, 2, 7};
    const feedback::FeedbackReport *ptr[] = {&r};
    const std::vector<std::vector<int>> m{{4}};
    const auto t = compute_prices(ptr, m, cfg);
    REQUIRE(t.entries.size() == 1);
    CHECK(t.entries[0].cell == 4);
    CHECK(t.entries[0].price_at(2) == Catch::Approx(feedback::dequantize_uniform(1, 3, 0.0, 8.0)));
    CHECK(payment_term(r, 2.0, 2, cfg) == Catch::Approx(2.0 * feedback::dequantize_uniform(1, 3, 0.0, 8.0)));
    CHECK(payment_term(r, 2.0, 1, cfg) == 0.0);
    CHECK(payment_term(r, 2.0, 0, cfg) == 0.0);
}

TEST_CASE("surplus is weighted rate minus the payment", "[pricing]")
{
    CHECK(surplus(2.0, 3.0, 2, {}) == 6.0);
    const VictimTerm honored[] = {{2, 0.3}};
    CHECK(surplus(2.0, 3.0, 2, honored) == 6.0);
    const VictimTerm one_up[] = {{1, 0.3}};
    CHECK(surplus(2.0, 3.0, 2, one_up) == Catch::Approx(6.0 - 0.3));
    const VictimTerm two[] = {{1, 0.3}, {3, 0.2}};
    CHECK(payment(2, two) == Catch::Approx(0.3 - 0.2));
}

TEST_CASE("single cell oracle picks the best weighted user and rank", "[pricing][oracle]")
{
    Engine rng(31);
    auto s = random_instance(rng, 1, 2, 2, 0.0);
    const auto opt = centralized_exhaustive(s);
    REQUIRE(opt.size() == 2);
    for (int k = 0; k < 2; ++k)
    {
        double best = -1.0;
        for (int q = 0; q < 2; ++q)
            for (int r = 1; r <= 2; ++r)
            {
                const CellChoice c[] = {{q, r}};
                best = std::max(best, s.weight[q] * profile_rates(s, k, c)[0]);
            }
        CHECK(opt[k].objective == Catch::Approx(best));
        const CellChoice c[] = {opt[k].choice[0]};
        CHECK(s.weight[opt[k].choice[0].user] * profile_rates(s, k, c)[0] == Catch::Approx(best));
    }
}

TEST_CASE("without cross gains the oracle decouples per cell", "[pricing][oracle]")
{
    Engine rng(32);
    auto s = random_instance(rng, 3, 2, 2, 0.0);
    const auto opt = centralized_exhaustive(s);
    const auto users = s.users_of_cell();
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 3; ++i)
        {
            double best = -1.0;
            for (int q : users[i])
                for (int r = 1; r <= 2; ++r)
                {
                    std::vector<CellChoice> c(3, CellChoice{});
                    c[i] = {q, r};
                    best = std::max(best, s.weight[q] * profile_rates(s, k, c)[i]);
                }
            std::vector<CellChoice> c(3, CellChoice{});
            c[i] = opt[k].choice[i];
            CHECK(s.weight[c[i].user] * profile_rates(s, k, c)[i] == Catch::Approx(best));
        }
}

TEST_CASE("strong mutual interference: the optimum is a fixed point of exactly priced surplus", "[pricing][oracle]")
{
    Engine rng(33);
    for (int trial = 0; trial < 4; ++trial)
    {
        auto s = random_instance(rng, 2, 2, 2, 0.8);
        const auto opt = centralized_exhaustive(s);
        const auto users = s.users_of_cell();
        for (int k = 0; k < 2; ++k)
        {
            const auto base = profile_rates(s, k, opt[k].choice);
            for (int i = 0; i < 2; ++i)
            {
                const int j = 1 - i;
                const double own = s.weight[opt[k].choice[i].user] * base[i];
                for (int q : users[i])
                    for (int r = 1; r <= 2; ++r)
                    {
                        auto alt = opt[k].choice;
                        alt[i] = {q, r};
                        const auto rates = profile_rates(s, k, alt);
                        // price paid: the neighbour's weighted loss caused by the deviation
                        const double pi = s.weight[alt[j].user] * (base[j] - rates[j]);
                        CHECK(s.weight[q] * rates[i] - pi <= own + 1e-9);
                    }
            }
        }
    }
}

TEST_CASE("oracle rejects instances beyond its size limits", "[pricing]")
{
    Engine rng(34);
    auto s = random_instance(rng, 1, 5, 2, 0.0);
    CHECK_THROWS_AS(centralized_exhaustive(s), std::invalid_argument);
}
