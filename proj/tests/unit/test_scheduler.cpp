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

#include <memory>

#include "helpers.hpp"
#include "rrsim/bus.hpp"
#include "rrsim/scheduler.hpp"

using namespace rrsim;
using namespace rrsim::sched;

namespace
{
    ReportPtr make_report(int user, int ri, int iri, std::vector<int> cqi)
    {
        auto r = std::make_shared<feedback::FeedbackReport>();
        r->user = user;
        r->rank_recommendation = iri > 0;
        r->serving_ri = ri;
        r->recommended_iri = iri;
        r->pmi.assign(cqi.size(), 0);
        r->cqi = std::move(cqi);
        return r;
    }

    topology::CompSets comp_sets(std::vector<std::vector<int>> m, int n_cells, const std::vector<int> &serving)
    {
        topology::CompSets cs;
        cs.measurement_set = std::move(m);
        cs.comp_users.assign(n_cells, {});
        cs.comp_requested.assign(n_cells, {});
        for (std::size_t q = 0; q < cs.measurement_set.size(); ++q)
        {
            if (!cs.measurement_set[q].empty())
                cs.comp_users[serving[q]].push_back(static_cast<int>(q));
            for (int j : cs.measurement_set[q])
                cs.comp_requested[j].push_back(static_cast<int>(q));
        }
        return cs;
    }

    std::vector<double> counts(std::initializer_list<std::pair<int, double>> c, int rank_max = 4)
    {
        std::vector<double> v(rank_max, 0.0);
        for (auto [r, n] : c)
            v[r - 1] = n;
        return v;
    }
} // namespace

TEST_CASE("cycling pattern sorts requested ranks by count", "[scheduler][pattern]")
{
    CyclingConfig cfg;
    const auto p = derive_cycling_pattern(counts({{1, 5}, {2, 3}, {3, 1}}), 1, 4, cfg);
    CHECK(std::vector<int>(p.priority.begin(), p.priority.begin() + 3) == std::vector<int>{1, 2, 3});
    CHECK(p.sequence == std::vector<int>{1, 2, 1, 2, 3});
    CHECK(p.priority.size() == 4);
}

TEST_CASE("equal request counts prefer the lower rank", "[scheduler][pattern]")
{
    CyclingConfig cfg;
    const auto p = derive_cycling_pattern(counts({{2, 4}, {1, 4}}), 1, 4, cfg);
    CHECK(p.priority[0] == 1);
    CHECK(p.priority[1] == 2);
}

TEST_CASE("pattern B repeats the first priority in the last slot", "[scheduler][pattern]")
{
    CyclingConfig cfg;
    cfg.slots = {1, 2, 1, 2, 1};
    const auto p = derive_cycling_pattern(counts({{2, 9}, {1, 3}}), 1, 4, cfg);
    CHECK(p.sequence == std::vector<int>{2, 1, 2, 1, 2});
    cfg.mode = CyclingMode::static_sequence;
    cfg.static_sequence = {1, 2, 1, 2, 3};
    CHECK(derive_cycling_pattern(counts({{2, 9}}), 1, 4, cfg).sequence == std::vector<int>{1, 2, 1, 2, 3});
}

TEST_CASE("three-cell cluster rotates masters and walks the rank sequence", "[scheduler][pattern]")
{
    const std::vector<int> cluster{0, 1, 2};
    CyclingConfig cfg;
    // cell 1 (index 0) has priority [2, 1, 3, ...]
    const auto p1 = derive_cycling_pattern(counts({{2, 6}, {1, 4}, {3, 1}}), 1, 4, cfg);
    REQUIRE(p1.priority[0] == 2);
    // subframes 1, 4, 7 (0-based 0, 3, 6): cell index 0 is master with L_M = 2, 1, 2
    for (auto [t, rank] : {std::pair{0, 2}, std::pair{3, 1}, std::pair{6, 2}})
    {
        CHECK(master_of(cluster, t) == 0);
        CHECK(master_rank(p1, t, 3) == rank);
    }
    // time 2: BS2 is master with L_M = 1 when its first priority is 1, the others are slaves
    const auto p2 = derive_cycling_pattern(counts({{1, 3}, {2, 1}}), 1, 4, cfg);
    CHECK(master_of(cluster, 1) == 1);
    CHECK(master_rank(p2, 1, 3) == 1);
    // subframe 13 (0-based 12) uses the fifth slot, I_3
    CHECK(master_rank(p1, 12, 3) == p1.priority[2]);
}

TEST_CASE("master partition by reported rank", "[scheduler][partition]")
{
    std::vector<ReportPtr> reports;
    for (int q = 0; q < 4; ++q)
        reports.push_back(make_report(q, 2, 1, {5}));
    const std::vector<int> users{0, 1, 2, 3};
    auto [m1, m2] = partition_master_users(users, 2, reports);
    CHECK(m1 == users);
    CHECK(m2.empty());
    std::tie(m1, m2) = partition_master_users(users, 3, reports);
    CHECK(m1.empty());
    // mixed reports against a direct filter
    Engine rng(40);
    std::vector<ReportPtr> mixed;
    std::vector<int> all;
    for (int q = 0; q < 20; ++q)
    {
        mixed.push_back(make_report(q, 1 + static_cast<int>(rng() % 4), 1, {3}));
        all.push_back(q);
    }
    std::tie(m1, m2) = partition_master_users(all, 2, mixed);
    std::vector<int> e1, e2;
    for (int q : all)
        (mixed[q]->serving_ri == 2 ? e1 : e2).push_back(q);
    CHECK(m1 == e1);
    CHECK(m2 == e2);
}

TEST_CASE("slave partition by CoMP membership and recommended rank", "[scheduler][partition]")
{
    // cells 0 (master), 1, 2 (slaves); users of cell 1: 0 non-CoMP, 1 recommends master at I*=1,
    // 2 recommends master at I*=2, 3 only interfered by the other slave
    const std::vector<int> serving{1, 1, 1, 1};
    const auto cs = comp_sets({{}, {0}, {0, 2}, {2}}, 3, serving);
    std::vector<ReportPtr> reports{make_report(0, 2, 1, {5}), make_report(1, 1, 1, {5}), make_report(2, 2, 2, {5}),
                                   make_report(3, 1, 1, {5})};
    const std::vector<int> users{0, 1, 2, 3};
    const auto g = partition_slave_users(users, 0, 1, reports, cs);
    CHECK(g.s3 == std::vector<int>{0});
    CHECK(g.s1 == std::vector<int>{1});
    CHECK(g.s2 == std::vector<int>{2, 3});
}

TEST_CASE("PF: single user takes every subband; higher CQI wins at equal averages", "[scheduler][pf]")
{
    feedback::FeedbackConfig cfg;
    PfState pf(2, 100.0, 0.01);
    std::vector<ReportPtr> reports{make_report(0, 1, 0, {5, 5, 5, 5}), make_report(1, 1, 0, {6, 4, 6, 4})};
    SchedulingGrid g(1, 4);
    const std::vector<int> one{0};
    schedule_subframe_baseline(g, 0, one, reports, pf, cfg);
    for (int k = 0; k < 4; ++k)
        CHECK(g.at(0, k).user == 0);
    SchedulingGrid h(1, 4);
    const std::vector<int> two{0, 1};
    schedule_subframe_baseline(h, 0, two, reports, pf, cfg);
    CHECK(h.at(0, 0).user == 1);
    CHECK(h.at(0, 1).user == 0);
    CHECK(h.at(0, 0).scheduled == Catch::Approx(feedback::cqi_rate(6, 1, cfg)));
    CHECK(h.at(0, 0).group == Group::plain);
}

TEST_CASE("PF splits subbands evenly between symmetric users over time", "[scheduler][pf]")
{
    feedback::FeedbackConfig cfg;
    PfState pf(2, 100.0, 0.01);
    Engine rng(41);
    long share[2] = {0, 0};
    const std::vector<int> users{0, 1};
    for (int t = 0; t < 2000; ++t)
    {
        std::vector<int> a(4), b(4);
        for (int k = 0; k < 4; ++k)
        {
            a[k] = 3 + static_cast<int>(rng() % 10);
            b[k] = 3 + static_cast<int>(rng() % 10);
        }
        std::vector<ReportPtr> reports{make_report(0, 1, 0, a), make_report(1, 1, 0, b)};
        SchedulingGrid g(1, 4);
        schedule_subframe_baseline(g, 0, users, reports, pf, cfg);
        std::vector<double> rate(2, 0.0);
        for (int k = 0; k < 4; ++k)
        {
            ++share[g.at(0, k).user];
            rate[g.at(0, k).user] += g.at(0, k).scheduled / 4;
        }
        pf.update(0, rate[0]);
        pf.update(1, rate[1]);
    }
    CHECK(static_cast<double>(share[0]) / (share[0] + share[1]) == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("inactive master: slaves run plain PF identical to the baseline", "[scheduler][ms]")
{
    feedback::FeedbackConfig cfg;
    const std::vector<int> serving{0, 0, 1, 1, 2, 2};
    const auto cs = comp_sets({{1}, {}, {0}, {}, {}, {1}}, 3, serving);
    std::vector<ReportPtr> reports;
    for (int q = 0; q < 6; ++q)
        reports.push_back(make_report(q, 1 + q % 2, 1, {3 + q, 9 - q, 5}));
    const std::vector<std::vector<int>> served{{0, 1}, {2, 3}, {4, 5}};
    const std::vector<int> cluster{0, 1, 2};
    PfState pf(6, 100.0, 0.01);
    SchedulingGrid base(3, 3), ms(3, 3), none(3, 3);
    for (int c : cluster)
        schedule_subframe_baseline(base, c, served[c], reports, pf, cfg);
    MasterCommit inactive{0, 2, false, {}};
    schedule_subframe_ms(ms, cluster, served, &inactive, reports, cs, pf, cfg);
    schedule_subframe_ms(none, cluster, served, nullptr, reports, cs, pf, cfg);
    CHECK(ms.same_decisions(base));
    CHECK(none.same_decisions(base));
}

TEST_CASE("strict priority: U_S1 users are placed before any U_S3 user", "[scheduler][ms]")
{
    feedback::FeedbackConfig cfg;
    // cell 0 master (one user, rank 1), cell 1 slave with one S1 user (weak CQI) and strong S3 users
    std::vector<int> serving{0, 1, 1, 1, 1, 1};
    const auto cs = comp_sets({{}, {0}, {}, {}, {}, {}}, 2, serving);
    std::vector<ReportPtr> reports{make_report(0, 1, 0, {9, 9, 9, 9}), make_report(1, 1, 1, {0, 3, 0, 2})};
    for (int q = 2; q < 6; ++q)
        reports.push_back(make_report(q, 2, 0, {12, 12, 12, 12}));
    const std::vector<std::vector<int>> served{{0}, {1, 2, 3, 4, 5}};
    PfState pf(6, 100.0, 0.01);
    MasterCommit commit{0, 1, true, candidates_of(std::vector<int>{0}, reports)};
    SchedulingGrid g(2, 4);
    const std::vector<int> cluster{0, 1};
    schedule_subframe_ms(g, cluster, served, &commit, reports, cs, pf, cfg);
    for (int k = 0; k < 4; ++k)
    {
        CHECK(g.at(0, k).user == 0);
        CHECK(g.at(0, k).group == Group::master_m1);
        CHECK(g.at(0, k).rank == 1);
    }
    // the S1 user holds every subband where its rate is positive, despite a much lower metric
    CHECK(g.at(1, 1).user == 1);
    CHECK(g.at(1, 3).user == 1);
    CHECK(g.at(1, 1).group == Group::slave_s1);
    // the rest go to U_S3
    CHECK(g.at(1, 0).group == Group::slave_s3);
    CHECK(g.at(1, 2).group == Group::slave_s3);
    CHECK(g.at(1, 0).user == 2);
}

TEST_CASE("master serves only U_M1 at L_M when the commit is active", "[scheduler][ms]")
{
    feedback::FeedbackConfig cfg;
    std::vector<int> serving{0, 0, 0};
    const auto cs = comp_sets({{}, {}, {}}, 1, serving);
    std::vector<ReportPtr> reports{make_report(0, 2, 0, {5, 5}), make_report(1, 1, 0, {15, 15}), make_report(2, 2, 0, {4, 6})};
    const auto m1 = partition_master_users(std::vector<int>{0, 1, 2}, 2, reports).first;
    CHECK(m1 == std::vector<int>{0, 2});
    MasterCommit commit{0, 2, true, candidates_of(m1, reports)};
    PfState pf(3, 100.0, 0.01);
    SchedulingGrid g(1, 2);
    const std::vector<std::vector<int>> served{{0, 1, 2}};
    const std::vector<int> cluster{0};
    schedule_subframe_ms(g, cluster, served, &commit, reports, cs, pf, cfg);
    for (int k = 0; k < 2; ++k)
    {
        CHECK(g.at(0, k).user != 1);
        CHECK(g.at(0, k).rank == 2);
    }
}

namespace
{
    // Single-link realization fixture: one cell, one user, identity-like channel.
    struct Fixture
    {
        channel::ChannelRealization h;
        topology::LargeScaleMap alpha;
        std::vector<std::vector<int>> modeled;
        std::vector<double> white;
        std::vector<std::vector<std::pair<int, double>>> subbands;
        phy::Codebook cb = phy::build_codebook(2, 2);
        RealizationContext ctx;

        Fixture(int n_cells, double cross)
        {
            channel::ChannelDims d;
            d.n_users = n_cells;
            d.n_cells = n_cells;
            d.n_rx = d.n_tx = 2;
            d.n_subcarriers = 1;
            h = channel::sample_channel(d, std::vector<char>(n_cells * n_cells, 1), {}, 3);
            alpha.n_users = alpha.n_cells = n_cells;
            for (int q = 0; q < n_cells; ++q)
            {
                for (int c = 0; c < n_cells; ++c)
                    alpha.alpha.push_back(q == c ? 1.0 : cross);
                std::vector<int> m;
                for (int c = 0; c < n_cells; ++c)
                    m.push_back(c);
                modeled.push_back(m);
            }
            white.assign(n_cells, 0.01);
            subbands = feedback::subband_blocks(1, 1, 1);
            ctx.h = &h;
            ctx.alpha = &alpha;
            ctx.modeled = &modeled;
            ctx.white = &white;
            ctx.subbands = &subbands;
            ctx.codebook = &cb;
        }
    };
} // namespace

TEST_CASE("realization: achievable above scheduled keeps the rate, below is an outage", "[scheduler][realize]")
{
    Fixture f(1, 0.0);
    SchedulingGrid g(1, 1);
    g.at(0, 0) = {0, 1, 0, 0.5, 0.0, Group::plain};
    const double ach = achievable_on_grid(g, 0, 0, f.ctx);
    REQUIRE(ach > 0.5);
    PfState pf(1, 100.0, 0.01);
    auto rates = realize_and_update(g, f.ctx, pf);
    CHECK(g.at(0, 0).realized == 0.5);
    CHECK(rates[0] == 0.5);
    CHECK(pf.average[0] == Catch::Approx(0.99 * 0.01 + 0.5 / 100.0));
    g.at(0, 0).scheduled = ach * 1.01;
    realize_and_update(g, f.ctx, pf);
    CHECK(g.at(0, 0).realized == 0.0);
}

TEST_CASE("an interferer at a higher rank than assumed causes an outage", "[scheduler][realize]")
{
    Fixture f(2, 0.8);
    SchedulingGrid g(2, 1);
    g.at(0, 0) = {0, 1, 0, 0.0, 0.0, Group::plain};
    g.at(1, 0) = {1, 1, 0, 0.0, 0.0, Group::plain};
    const double quiet = achievable_on_grid(g, 0, 0, f.ctx);
    g.at(1, 0).rank = 2;
    const double loud = achievable_on_grid(g, 0, 0, f.ctx);
    REQUIRE(loud < quiet);
    // scheduled on the rank-1 assumption
    g.at(0, 0).scheduled = quiet;
    g.at(1, 0).scheduled = 0.0;
    PfState pf(2, 100.0, 0.01);
    realize_and_update(g, f.ctx, pf);
    CHECK(g.at(0, 0).realized == 0.0);
}

TEST_CASE("outer loop raises the offset on success and lowers it on outage", "[scheduler][realize]")
{
    Fixture f(1, 0.0);
    f.ctx.link_adaptation.mode = LinkAdaptationMode::outer_loop;
    PfState pf(1, 100.0, 0.01);
    SchedulingGrid g(1, 1);
    g.at(0, 0) = {0, 1, 0, 0.1, 0.0, Group::plain};
    realize_and_update(g, f.ctx, pf);
    CHECK(pf.offset_db[0] == Catch::Approx(0.5 / 9.0));
    g.at(0, 0).scheduled = 1e3;
    g.at(0, 0).realized = 0.0;
    realize_and_update(g, f.ctx, pf);
    CHECK(pf.offset_db[0] == Catch::Approx(0.5 / 9.0 - 0.5));
    for (int i = 0; i < 100; ++i)
        realize_and_update(g, f.ctx, pf);
    CHECK(pf.offset_db[0] == f.ctx.link_adaptation.min_offset_db);
    // the offset feeds the scheduled rate
    feedback::FeedbackConfig cfg;
    auto r = make_report(0, 1, 0, {8});
    CHECK(scheduled_rate(*r, 0, cfg, 2.0) > scheduled_rate(*r, 0, cfg, 0.0));
    // static mode leaves the offset untouched
    PfState st(1, 100.0, 0.01);
    f.ctx.link_adaptation.mode = LinkAdaptationMode::static_backoff;
    realize_and_update(g, f.ctx, st);
    CHECK(st.offset_db[0] == 0.0);
}

TEST_CASE("bus delivers each message once, at or after its latency", "[scheduler][bus]")
{
    CoordinationBus bus(BusLatency{2, 10, 1});
    bus.post(RankRequest{3, 1, 0, 1, 0.5}, 0);
    bus.post(PatternBroadcast{0, {1, 2}, {1, 2, 1, 2, 1}}, 0);
    bus.post(MasterState{0, 0, 5, 2, true}, 3);
    CHECK(bus.deliver(1).empty());
    auto d = bus.deliver(2);
    REQUIRE(d.size() == 1);
    CHECK(std::holds_alternative<RankRequest>(d[0].message));
    CHECK(d[0].deliver == 2);
    d = bus.deliver(4);
    REQUIRE(d.size() == 1);
    CHECK(std::string(kind_name(d[0].message)) == kind_name(Message{MasterState{}}));
    CHECK(bus.deliver(9).empty());
    d = bus.deliver(100);
    REQUIRE(d.size() == 1);
    CHECK(d[0].deliver == 10);
    CHECK(bus.pending() == 0);
    CHECK(bus.log().size() == 3);
    CHECK(bus.log()[2].seq > bus.log()[1].seq);
}

TEST_CASE("scheduler settings are validated", "[scheduler]")
{
    SchedulerConfig s;
    CHECK_NOTHROW(s.validate());
    s.pf_horizon = 0.5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = SchedulerConfig{};
    s.link_adaptation.min_offset_db = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CyclingConfig c;
    c.mode = CyclingMode::static_sequence;
    c.static_sequence = {1, 5};
    CHECK_THROWS_AS(c.validate(1, 4), ConfigError);
}
