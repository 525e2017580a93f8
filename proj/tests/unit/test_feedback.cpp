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
#include "rrsim/feedback.hpp"

using namespace rrsim;
using namespace rrsim::feedback;
using namespace rrsim::test;

namespace
{
    FeedbackConfig small_config(int rank_max)
    {
        FeedbackConfig cfg;
        cfg.rank_min = 1;
        cfg.rank_max = rank_max;
        return cfg;
    }
} // namespace

TEST_CASE("subband weights sum to one", "[feedback]")
{
    for (int coherence : {1, 2, 3, 8})
    {
        const auto sb = subband_blocks(5, 4, coherence);
        REQUIRE(sb.size() == 5);
        for (const auto &k : sb)
        {
            double w = 0.0;
            for (const auto &[b, x] : k)
                w += x;
            CHECK(w == Catch::Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("expected rate without interferers is the single-shot rate", "[feedback]")
{
    Engine rng(20);
    const auto view = random_view(rng, 2, 0, 2, 1, 0.1, 0.0);
    const auto cb = phy::build_codebook(2, 2);
    const CMat &f = cb.at(2, 1);
    const auto t = expected_rate(view, f, {}, cb, phy::ReceiverStrategy::mmse_irc_ideal, {});
    for (int k = 0; k < 2; ++k)
        CHECK(t[k] == Catch::Approx(oracle_block_rate(view, k, f, {}, phy::ReceiverStrategy::mmse_irc_ideal, 6.0)).epsilon(1e-10));
}

TEST_CASE("one-entry codebook gives the single-draw rate", "[feedback]")
{
    Engine rng(21);
    const auto view = random_view(rng, 2, 1, 2, 1, 0.1, 0.5);
    const auto cb = truncate_codebook(phy::build_codebook(2, 2), 1);
    const std::vector<int> ranks{1};
    const auto t = expected_rate(view, cb.at(1, 0), ranks, cb, phy::ReceiverStrategy::mmse_irc_ideal, {});
    for (int k = 0; k < 2; ++k)
        CHECK(t[k] == Catch::Approx(oracle_block_rate(view, k, cb.at(1, 0), {cb.at(1, 0)}, phy::ReceiverStrategy::mmse_irc_ideal, 6.0)).epsilon(1e-10));
}

TEST_CASE("four-entry rank-1 codebook averages the four enumerated rates", "[feedback]")
{
    Engine rng(22);
    const auto cb = truncate_codebook(phy::build_codebook(4, 4), 4);
    for (auto strategy : {phy::ReceiverStrategy::mmse_irc_ideal, phy::ReceiverStrategy::mmse_irc_simplified})
        for (int trial = 0; trial < 5; ++trial)
        {
            const auto view = random_view(rng, 4, 1, 3, 2, 0.05, 1.0);
            const std::vector<int> ranks{1};
            const auto t = expected_rate(view, cb.at(2, 3), ranks, cb, strategy, {});
            double hand[3] = {0, 0, 0};
            for (int k = 0; k < 3; ++k)
            {
                for (const auto &[b, w] : view.subbands[k])
                {
                    double acc = 0.0;
                    for (int c = 0; c < 4; ++c)
                        acc += oracle_block_rate(view, b, cb.at(2, 3), {cb.at(1, c)}, strategy, 6.0);
                    hand[k] += w * acc / 4.0;
                }
                CHECK(t[k] == Catch::Approx(hand[k]).epsilon(1e-10));
            }
        }
}

TEST_CASE("draw sets: exhaustive enumeration and seeded Monte-Carlo", "[feedback]")
{
    const auto cb = phy::build_codebook(4, 4);
    const std::vector<int> two{1, 2};
    Sampling s;
    const auto ex = make_draws(two, cb, 1, 4, s, 256);
    CHECK(ex.exhaustive);
    CHECK(ex.n_draws == 256);
    // product beyond the limit falls back to Monte-Carlo
    const auto mc = make_draws(two, cb, 1, 4, s, 100);
    CHECK_FALSE(mc.exhaustive);
    CHECK(mc.n_draws == s.draws);
    const auto again = make_draws(two, cb, 1, 4, s, 100);
    CHECK(mc.index == again.index);
    // unknown ranks are drawn uniformly
    const std::vector<int> unknown{0};
    const auto u = make_draws(unknown, cb, 1, 4, Sampling{SamplingMode::exhaustive, 2000, 9}, 256);
    CHECK_FALSE(u.exhaustive);
    std::vector<int> hist(5, 0);
    for (const auto &r : u.rank)
        ++hist[r[0]];
    for (int r = 1; r <= 4; ++r)
        CHECK(hist[r] == Catch::Approx(500).margin(75));
    CHECK_THROWS(make_draws(std::vector<int>{1}, phy::Codebook{4, 0, {{}}}, 1, 1, s));
}

TEST_CASE("selection matches exhaustive enumeration on small instances", "[feedback][oracle]")
{
    Engine rng(23);
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial)
    {
        const int n = trial % 2 ? 2 : 4;
        const int J = trial % 3;
        const auto cb = truncate_codebook(phy::build_codebook(n, 2), 1 + trial % 4);
        const auto view = random_view(rng, n, J, 2, 1, 0.02 + 0.1 * (trial % 5), 0.3 + trial % 7);
        auto cfg = small_config(n);
        cfg.receiver = trial % 4 == 3 ? phy::ReceiverStrategy::mmse_irc_simplified : phy::ReceiverStrategy::mmse_irc_ideal;
        const auto r = select_ranks_and_precoders(view, cb, cfg, 1);
        const auto o = oracle_select(view, cb, cfg.rank_min, cfg.rank_max, cfg.receiver, cfg.rate_cap, cfg.tie_tolerance);
        CHECK(r.serving_ri == o.serving_ri);
        CHECK(r.recommended_iri == o.iri);
        CHECK(r.pmi == o.pmi);
        for (std::size_t k = 0; k < o.estimated.size(); ++k)
            CHECK(r.estimated[k] == Catch::Approx(o.estimated[k]).epsilon(1e-9));
        for (std::size_t i = 0; i < o.score.size(); ++i)
            CHECK(r.score[i] == Catch::Approx(o.score[i]).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("dominant interferer with ideal IRC: I* equals the brute-force optimum", "[feedback][oracle]")
{
    Engine rng(24);
    const auto cb = truncate_codebook(phy::build_codebook(4, 4), 4);
    for (int trial = 0; trial < 6; ++trial)
    {
        const auto view = random_view(rng, 4, 1, 2, 1, 0.01, 3.0);
        auto cfg = small_config(4);
        const auto r = select_ranks_and_precoders(view, cb, cfg, 1);
        const auto o = oracle_select(view, cb, 1, 4, cfg.receiver, cfg.rate_cap, cfg.tie_tolerance);
        CHECK(r.recommended_iri == o.iri);
        CHECK(r.serving_ri == o.serving_ri);
    }
}

TEST_CASE("high SNR, no interference, well-conditioned channel: full rank wins", "[feedback]")
{
    feedback::TerminalView v;
    v.n_rx = v.n_tx = 4;
    v.noise = 1e-4;
    CMat h = CMat::Identity(4, 4);
    v.serving = {h};
    v.subbands = subband_blocks(1, 1, 1);
    const auto cb = phy::build_codebook(4, 2);
    auto cfg = small_config(4);
    cfg.rate_cap = 30.0;
    const auto r = select_ranks_and_precoders(v, cb, cfg, 1);
    CHECK(r.serving_ri == 4);
    // verified against direct evaluation
    double best_lower = 0.0;
    for (int L = 1; L < 4; ++L)
        for (int c = 0; c < cb.size(L); ++c)
            best_lower = std::max(best_lower, oracle_block_rate(v, 0, cb.at(L, c), {}, cfg.receiver, cfg.rate_cap));
    double best_full = 0.0;
    for (int c = 0; c < cb.size(4); ++c)
        best_full = std::max(best_full, oracle_block_rate(v, 0, cb.at(4, c), {}, cfg.receiver, cfg.rate_cap));
    CHECK(best_full > best_lower);
}

TEST_CASE("ties resolve toward the lowest ranks and index", "[feedback]")
{
    feedback::TerminalView v;
    v.n_rx = v.n_tx = 2;
    v.noise = 1.0;
    v.serving = {CMat::Zero(2, 2)};
    v.interferers = {{CMat::Zero(2, 2)}};
    v.alpha_interferers = {1.0};
    v.subbands = subband_blocks(1, 1, 1);
    const auto cb = phy::build_codebook(2, 2);
    const auto r = select_ranks_and_precoders(v, cb, small_config(2), 1);
    CHECK(r.serving_ri == 1);
    CHECK(r.recommended_iri == 1);
    CHECK(r.pmi == std::vector<int>{0});
    // no interferers: every I is equivalent, the lowest is reported
    feedback::TerminalView w = v;
    w.interferers.clear();
    w.alpha_interferers.clear();
    w.serving = {CMat::Identity(2, 2)};
    const auto s = select_ranks_and_precoders(w, cb, small_config(2), 1);
    CHECK(s.recommended_iri == 1);
}

TEST_CASE("empty measurement set: recommendation report equals the baseline report", "[feedback]")
{
    Engine rng(25);
    const auto cb = phy::build_codebook(4, 4);
    for (int trial = 0; trial < 5; ++trial)
    {
        const auto v = random_view(rng, 4, 0, 4, 2, 0.05 + 0.2 * trial, 0.0);
        auto rr = small_config(4);
        auto base = rr;
        base.mode = ReportMode::baseline;
        const auto a = select_ranks_and_precoders(v, cb, rr, 7);
        const auto b = select_ranks_and_precoders(v, cb, base, 8);
        CHECK(a.serving_ri == b.serving_ri);
        CHECK(a.pmi == b.pmi);
        CHECK(a.cqi == b.cqi);
        CHECK(a.estimated == b.estimated);
    }
}

TEST_CASE("delta-CQI is zero at the optimum and never negative", "[feedback]")
{
    Engine rng(26);
    const auto cb = phy::build_codebook(4, 2);
    for (int trial = 0; trial < 8; ++trial)
    {
        const auto v = random_view(rng, 4, 1 + trial % 2, 2, 2, 0.05, 1.0);
        const auto cfg = small_config(4);
        const auto r = select_ranks_and_precoders(v, cb, cfg, trial);
        REQUIRE(r.delta_cqi.size() == r.score.size());
        CHECK(delta_loss(r, r.serving_ri, r.recommended_iri, cfg) == 0.0);
        for (int d : r.delta_cqi)
            CHECK(d >= 0);
        for (std::size_t i = 0; i < r.score.size(); ++i)
            CHECK(r.score[i] <= r.best_score() + 1e-12);
        CHECK(r.profile_of(r.recommended_iri) == r.best_profile);
    }
}

TEST_CASE("uniform quantizer saturates, floors and round-trips within half a step", "[feedback][quantizer]")
{
    CHECK(quantize_uniform(30.0, 4, 0.0, 30.0) == 15);
    CHECK(quantize_uniform(100.0, 4, 0.0, 30.0) == 15);
    CHECK(quantize_uniform(0.0, 4, 0.0, 30.0) == 0);
    CHECK(quantize_uniform(-3.0, 4, 0.0, 30.0) == 0);
    const double step = 30.0 / 15.0;
    for (double v = 0.1; v < 30.0; v += 0.37)
        CHECK(std::abs(dequantize_uniform(quantize_uniform(v, 4, 0.0, 30.0), 4, 0.0, 30.0) - v) <= step / 2 + 1e-12);
    CHECK(quantize_uniform(8.0, 3, 0.0, 8.0) == 7);
}

TEST_CASE("CQI levels map back to rates with backoff and offset", "[feedback][quantizer]")
{
    FeedbackConfig cfg;
    CHECK(cqi_rate(0, 2, cfg) == 0.0); // out of range
    const int level = quantize_cqi(2.0 * std::log2(1.0 + db_to_linear(8.0)), 2, cfg);
    CHECK(level == quantize_uniform(8.0, 4, -10.0, 20.0));
    const double sinr = dequantize_uniform(level, 4, -10.0, 20.0);
    CHECK(cqi_rate(level, 2, cfg) == Catch::Approx(2.0 * std::log2(1.0 + db_to_linear(sinr - 1.0))));
    CHECK(cqi_rate(level, 2, cfg, 1.0) == Catch::Approx(2.0 * std::log2(1.0 + db_to_linear(sinr))));
    CHECK(cqi_rate(15, 1, cfg, 30.0) == cfg.rate_cap);
    CHECK(quantize_cqi(0.0, 1, cfg) == 0);
    cfg.cqi_domain = CqiDomain::rate;
    cfg.cqi_lo = 0.0;
    cfg.cqi_hi = 30.0;
    CHECK(quantize_cqi(30.0, 4, cfg) == 15);
}

TEST_CASE("feedback configuration is validated", "[feedback]")
{
    FeedbackConfig cfg;
    CHECK_NOTHROW(cfg.validate(4));
    cfg.rank_max = 5;
    CHECK_THROWS_AS(cfg.validate(4), ConfigError);
    cfg = FeedbackConfig{};
    cfg.draws = 0;
    CHECK_THROWS_AS(cfg.validate(4), ConfigError);
    cfg = FeedbackConfig{};
    cfg.cqi_hi = cfg.cqi_lo;
    CHECK_THROWS_AS(cfg.validate(4), ConfigError);
}
