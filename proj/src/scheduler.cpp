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

#include "rrsim/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rrsim::sched
{
    void CyclingConfig::validate(int rank_min, int rank_max) const
    {
        if (slots.empty())
            throw ConfigError("cycling template must not be empty");
        for (int s : slots)
            if (s < 1)
                throw ConfigError("cycling template entries are 1-based priority positions");
        if (mode == CyclingMode::static_sequence)
        {
            if (static_sequence.empty())
                throw ConfigError("static cycling sequence must not be empty");
            for (int r : static_sequence)
                if (r < rank_min || r > rank_max)
                    throw ConfigError("static cycling sequence entries must lie within the rank bounds");
        }
        if (update_period < 1)
            throw ConfigError("cycling.update_period must be >= 1");
    }

    void SchedulerConfig::validate() const
    {
        if (!(pf_horizon >= 1.0))
            throw ConfigError("scheduler.pf_horizon must be >= 1");
        if (!(pf_epsilon > 0.0))
            throw ConfigError("scheduler.pf_epsilon must be > 0");
        if (latency.rank_request < 0 || latency.pattern_broadcast < 0 || latency.master_state < 0)
            throw ConfigError("backhaul latencies must be >= 0");
        const auto &la = link_adaptation;
        if (!(la.ack_step_db >= 0.0) || !(la.nack_step_db >= 0.0) || !(la.min_offset_db <= 0.0) || !(la.max_offset_db >= 0.0))
            throw ConfigError("outer-loop steps must be >= 0 and the offset range must contain 0");
    }

    CyclingPattern derive_cycling_pattern(std::span<const double> counts, int rank_min, int rank_max, const CyclingConfig &cfg)
    {
        CyclingPattern p;
        std::vector<int> requested, rest;
        for (int r = rank_min; r <= rank_max; ++r)
        {
            const double c = r - rank_min < static_cast<int>(counts.size()) ? counts[r - rank_min] : 0.0;
            (c > 0.0 ? requested : rest).push_back(r);
        }
        std::stable_sort(requested.begin(), requested.end(),
                         [&](int a, int b) { return counts[a - rank_min] > counts[b - rank_min]; });
        p.priority = requested;
        p.priority.insert(p.priority.end(), rest.begin(), rest.end());
        if (cfg.mode == CyclingMode::static_sequence)
            p.sequence = cfg.static_sequence;
        else
            for (int s : cfg.slots)
                p.sequence.push_back(p.priority[(s - 1) % p.priority.size()]);
        return p;
    }

    int master_of(std::span<const int> cluster_cells, int subframe)
    {
        return cluster_cells[subframe % cluster_cells.size()];
    }

    int master_rank(const CyclingPattern &pattern, int subframe, int cluster_size)
    {
        const int k = subframe / cluster_size;
        return pattern.sequence[k % pattern.sequence.size()];
    }

    const char *group_name(Group g)
    {
        switch (g)
        {
        case Group::plain:
            return "PF";
        case Group::master_m1:
            return "M1";
        case Group::master_m2:
            return "M2";
        case Group::slave_s1:
            return "S1";
        case Group::slave_s2:
            return "S2";
        case Group::slave_s3:
            return "S3";
        }
        return "?";
    }

    bool SchedulingGrid::same_decisions(const SchedulingGrid &o) const
    {
        if (n_cells_ != o.n_cells_ || n_subbands_ != o.n_subbands_)
            return false;
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (!a_[i].same_decision(o.a_[i]))
                return false;
        return true;
    }

    double scheduled_rate(const feedback::FeedbackReport &r, int k, const feedback::FeedbackConfig &cfg, double offset_db)
    {
        return feedback::cqi_rate(r.cqi[k], r.serving_ri, cfg, offset_db);
    }

    void pf_fill(SchedulingGrid &grid, int cell, std::span<const Candidate> candidates, const PfState &pf,
                 const feedback::FeedbackConfig &cfg, Group group)
    {
        for (int k = 0; k < grid.n_subbands(); ++k)
        {
            Allocation &a = grid.at(cell, k);
            if (a.user >= 0)
                continue;
            const Candidate *best = nullptr;
            double best_metric = 0.0, best_rate = 0.0;
            for (const auto &c : candidates)
            {
                const double rate = scheduled_rate(*c.report, k, cfg, pf.offset_db[c.user]);
                const double metric = rate / pf.average[c.user];
                if (metric > best_metric || (best && metric == best_metric && c.user < best->user))
                {
                    best = &c;
                    best_metric = metric;
                    best_rate = rate;
                }
            }
            if (!best)
                continue;
            a.user = best->user;
            a.rank = best->report->serving_ri;
            a.pmi = best->report->pmi[k];
            a.scheduled = best_rate;
            a.group = group;
        }
    }

    std::vector<Candidate> candidates_of(std::span<const int> users, std::span<const ReportPtr> reports)
    {
        std::vector<Candidate> out;
        for (int q : users)
            if (reports[q])
                out.push_back({q, reports[q]});
        return out;
    }

    void schedule_subframe_baseline(SchedulingGrid &grid, int cell, std::span<const int> users,
                                    std::span<const ReportPtr> reports, const PfState &pf, const feedback::FeedbackConfig &cfg)
    {
        const auto c = candidates_of(users, reports);
        pf_fill(grid, cell, c, pf, cfg, Group::plain);
    }

    std::pair<std::vector<int>, std::vector<int>> partition_master_users(std::span<const int> users, int rank,
                                                                         std::span<const ReportPtr> reports)
    {
        std::pair<std::vector<int>, std::vector<int>> out;
        for (int q : users)
        {
            if (!reports[q])
                continue;
            (reports[q]->serving_ri == rank ? out.first : out.second).push_back(q);
        }
        return out;
    }

    SlaveGroups partition_slave_users(std::span<const int> users, int master, int rank, std::span<const ReportPtr> reports,
                                      const topology::CompSets &comp)
    {
        SlaveGroups g;
        for (int q : users)
        {
            if (!reports[q])
                continue;
            if (!comp.is_comp_user(q))
            {
                g.s3.push_back(q);
                continue;
            }
            const auto &m = comp.measurement_set[q];
            const auto it = std::find(m.begin(), m.end(), master);
            bool honoured = false;
            if (it != m.end() && reports[q]->rank_recommendation)
            {
                const auto &pc = reports[q]->per_cell_iri;
                const int iri = pc.size() == m.size() ? pc[it - m.begin()] : reports[q]->recommended_iri;
                honoured = iri == rank;
            }
            (honoured ? g.s1 : g.s2).push_back(q);
        }
        return g;
    }

    void schedule_subframe_ms(SchedulingGrid &grid, std::span<const int> cluster_cells,
                              const std::vector<std::vector<int>> &served, const MasterCommit *commit,
                              std::span<const ReportPtr> reports, const topology::CompSets &comp, const PfState &pf,
                              const feedback::FeedbackConfig &cfg)
    {
        if (!commit || !commit->state)
        {
            for (int c : cluster_cells)
                schedule_subframe_baseline(grid, c, served[c], reports, pf, cfg);
            return;
        }
        pf_fill(grid, commit->master, commit->um1, pf, cfg, Group::master_m1);
        for (int c : cluster_cells)
        {
            if (c == commit->master)
                continue;
            const auto g = partition_slave_users(served[c], commit->master, commit->rank, reports, comp);
            pf_fill(grid, c, candidates_of(g.s1, reports), pf, cfg, Group::slave_s1);
            pf_fill(grid, c, candidates_of(g.s3, reports), pf, cfg, Group::slave_s3);
            pf_fill(grid, c, candidates_of(g.s2, reports), pf, cfg, Group::slave_s2);
        }
    }

    double achievable_on_grid(const SchedulingGrid &grid, int cell, int k, const RealizationContext &ctx)
    {
        const Allocation &a = grid.at(cell, k);
        if (a.user < 0)
            return 0.0;
        const int q = a.user;
        const auto &alpha = *ctx.alpha;
        double rate = 0.0;
        for (const auto &[b, w] : (*ctx.subbands)[k])
        {
            phy::LinkState link;
            link.H = ctx.h->block(q, cell, b);
            link.alpha = alpha(q, cell);
            link.power = ctx.power;
            link.F = ctx.codebook->at(a.rank, a.pmi);
            link.noise = (*ctx.white)[q];
            for (int j : (*ctx.modeled)[q])
            {
                if (j == cell)
                    continue;
                const Allocation &o = grid.at(j, k);
                if (o.user < 0)
                    continue;
                link.interferers.push_back({ctx.h->block(q, j, b), alpha(q, j), ctx.power, ctx.codebook->at(o.rank, o.pmi)});
            }
            rate += w * phy::link_rate(link, ctx.receiver, ctx.rate_cap);
        }
        return rate;
    }

    std::vector<double> realize_and_update(SchedulingGrid &grid, const RealizationContext &ctx, PfState &pf)
    {
        std::vector<double> user_rate(pf.average.size(), 0.0);
        const int K = grid.n_subbands();
        for (int c = 0; c < grid.n_cells(); ++c)
            for (int k = 0; k < K; ++k)
            {
                Allocation &a = grid.at(c, k);
                if (a.user < 0)
                    continue;
                const double ach = achievable_on_grid(grid, c, k, ctx);
                const bool ok = ach >= a.scheduled * (1.0 - 1e-9);
                a.realized = ok ? a.scheduled : 0.0;
                user_rate[a.user] += a.realized / K;
                const auto &la = ctx.link_adaptation;
                if (la.mode == LinkAdaptationMode::outer_loop)
                {
                    double &o = pf.offset_db[a.user];
                    o = std::clamp(ok ? o + la.ack_step_db : o - la.nack_step_db, la.min_offset_db, la.max_offset_db);
                }
            }
        for (std::size_t q = 0; q < user_rate.size(); ++q)
            pf.update(static_cast<int>(q), user_rate[q]);
        return user_rate;
    }

} // namespace rrsim::sched
