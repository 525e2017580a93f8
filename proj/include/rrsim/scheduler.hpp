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

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "rrsim/bus.hpp"
#include "rrsim/channel.hpp"
#include "rrsim/feedback.hpp"
#include "rrsim/phy.hpp"
#include "rrsim/topology.hpp"

namespace rrsim::sched
{
    using ReportPtr = std::shared_ptr<const feedback::FeedbackReport>;

    enum class SchedulerKind
    {
        baseline,
        master_slave,
        baseline_with_rr_feedback
    };

    enum class CyclingMode
    {
        dynamic,
        static_sequence
    };

    enum class PatternWeighting
    {
        counts,  // number of requests per rank
        weighted // requests weighted by their effective QoS
    };

    struct CyclingConfig
    {
        CyclingMode mode = CyclingMode::dynamic;
        std::vector<int> slots{1, 2, 1, 2, 3};            // template over priorities: A = 1,2,1,2,3; B = 1,2,1,2,1
        std::vector<int> static_sequence{1, 2, 1, 2, 3}; // ranks, static mode
        int update_period = 20;                           // subframes between pattern recomputations
        PatternWeighting weighting = PatternWeighting::counts;

        void validate(int rank_min, int rank_max) const;
    };

    enum class LinkAdaptationMode
    {
        static_backoff, // CQI used as reported (minus the feedback backoff)
        outer_loop      // per-user offset driven by allocation success/failure
    };

    struct LinkAdaptationConfig
    {
        LinkAdaptationMode mode = LinkAdaptationMode::static_backoff;
        double ack_step_db = 0.5 / 9.0; // raise after a successful allocation
        double nack_step_db = 0.5;      // lower after an outage
        double min_offset_db = -20.0;
        double max_offset_db = 10.0;
    };

    struct SchedulerConfig
    {
        SchedulerKind kind = SchedulerKind::master_slave;
        double pf_horizon = 100.0; // t_c
        double pf_epsilon = 0.01;
        BusLatency latency;
        LinkAdaptationConfig link_adaptation;

        void validate() const;
    };

    struct CyclingPattern
    {
        std::vector<int> priority; // ranks by decreasing priority
        std::vector<int> sequence; // master ranks, repeated
    };

    // counts[r - rank_min] = number (or weight) of requests for rank r.
    CyclingPattern derive_cycling_pattern(std::span<const double> counts, int rank_min, int rank_max, const CyclingConfig &cfg);

    // Round-robin master of a cluster and the rank it uses at subframe t (0-based).
    int master_of(std::span<const int> cluster_cells, int subframe);
    int master_rank(const CyclingPattern &pattern, int subframe, int cluster_size);

    struct PfState
    {
        std::vector<double> average;
        std::vector<double> offset_db; // outer-loop CQI offset per user
        double horizon = 100.0;

        PfState() = default;
        PfState(int n_users, double horizon, double epsilon) : average(n_users, epsilon), offset_db(n_users, 0.0), horizon(horizon) {}
        double weight(int q) const { return 1.0 / average[q]; }
        void update(int q, double rate) { average[q] = (1.0 - 1.0 / horizon) * average[q] + rate / horizon; }
    };

    enum class Group
    {
        plain = 0,
        master_m1,
        master_m2,
        slave_s1,
        slave_s2,
        slave_s3
    };
    const char *group_name(Group g);

    struct Allocation
    {
        int user = -1;
        int rank = 0;
        int pmi = -1;
        double scheduled = 0.0;
        double realized = 0.0;
        Group group = Group::plain;

        // Same decision (realized rate excluded).
        bool same_decision(const Allocation &o) const
        {
            return user == o.user && rank == o.rank && pmi == o.pmi && scheduled == o.scheduled;
        }
    };

    class SchedulingGrid
    {
    public:
        SchedulingGrid(int n_cells, int n_subbands) : n_cells_(n_cells), n_subbands_(n_subbands), a_(static_cast<std::size_t>(n_cells) * n_subbands) {}
        int n_cells() const { return n_cells_; }
        int n_subbands() const { return n_subbands_; }
        Allocation &at(int cell, int k) { return a_[static_cast<std::size_t>(cell) * n_subbands_ + k]; }
        const Allocation &at(int cell, int k) const { return a_[static_cast<std::size_t>(cell) * n_subbands_ + k]; }
        bool same_decisions(const SchedulingGrid &o) const;

    private:
        int n_cells_, n_subbands_;
        std::vector<Allocation> a_;
    };

    struct Candidate
    {
        int user = -1;
        ReportPtr report;
    };

    // Rate assumed by the scheduler for a user's report on subband k.
    double scheduled_rate(const feedback::FeedbackReport &r, int k, const feedback::FeedbackConfig &cfg, double offset_db = 0.0);

    // PF over the still-free subbands of `cell`: per subband the candidate with the largest positive
    // scheduled_rate / average wins, ties to the lowest user id. Each winner uses its reported rank and PMI.
    void pf_fill(SchedulingGrid &grid, int cell, std::span<const Candidate> candidates, const PfState &pf,
                 const feedback::FeedbackConfig &cfg, Group group);

    // Candidates of a cell from the current reports (users without a report are skipped).
    std::vector<Candidate> candidates_of(std::span<const int> users, std::span<const ReportPtr> reports);

    void schedule_subframe_baseline(SchedulingGrid &grid, int cell, std::span<const int> users,
                                    std::span<const ReportPtr> reports, const PfState &pf, const feedback::FeedbackConfig &cfg);

    // U_M1 = {q : R*_q = L_M}, U_M2 = the rest.
    std::pair<std::vector<int>, std::vector<int>> partition_master_users(std::span<const int> users, int rank,
                                                                         std::span<const ReportPtr> reports);

    struct SlaveGroups
    {
        std::vector<int> s1, s2, s3;
    };

    // U_S1: CoMP users with the master in M_q and I*_q (toward the master) = L_M; U_S2: other CoMP users;
    // U_S3: non-CoMP users.
    SlaveGroups partition_slave_users(std::span<const int> users, int master, int rank, std::span<const ReportPtr> reports,
                                      const topology::CompSets &comp);

    // What the master committed to for one subframe (taken `latency` subframes ahead).
    struct MasterCommit
    {
        int master = -1;
        int rank = 0;
        bool state = false;
        std::vector<Candidate> um1; // snapshot of U_M1 with the reports it was built from
    };

    enum class Role
    {
        none,
        master,
        slave
    };

    // Master-Slave scheduling of one cluster. With no committed active master every cell runs plain PF.
    void schedule_subframe_ms(SchedulingGrid &grid, std::span<const int> cluster_cells,
                              const std::vector<std::vector<int>> &served, const MasterCommit *commit,
                              std::span<const ReportPtr> reports, const topology::CompSets &comp, const PfState &pf,
                              const feedback::FeedbackConfig &cfg);

    // Everything needed to evaluate a grid on the true channel.
    struct RealizationContext
    {
        const channel::ChannelRealization *h = nullptr;
        const topology::LargeScaleMap *alpha = nullptr;
        const std::vector<std::vector<int>> *modeled = nullptr; // per user: cells with explicit MIMO links
        const std::vector<double> *white = nullptr;             // per user: sigma^2 + unmodeled interference
        const std::vector<std::vector<std::pair<int, double>>> *subbands = nullptr;
        const phy::Codebook *codebook = nullptr;
        phy::ReceiverStrategy receiver = phy::ReceiverStrategy::mmse_irc_ideal;
        double power = 1.0;
        double rate_cap = 6.0;
        LinkAdaptationConfig link_adaptation;
    };

    // Achievable rate of allocation (cell, k) against the actual co-schedule.
    double achievable_on_grid(const SchedulingGrid &grid, int cell, int k, const RealizationContext &ctx);

    // Fills realized rates (scheduled if achievable, else 0), updates PF with each user's band-average
    // realized rate and returns those per-user rates.
    std::vector<double> realize_and_update(SchedulingGrid &grid, const RealizationContext &ctx, PfState &pf);

} // namespace rrsim::sched
