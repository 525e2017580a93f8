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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rrsim/config.hpp"
#include "rrsim/scheduler.hpp"

namespace rrsim::sim
{
    struct AuditTotals
    {
        std::int64_t us1_checks = 0;        // S1 allocations while the master transmits at L_M
        std::int64_t violations = 0;        // of those, non-zero payment contributions
        std::int64_t concavity_violations = 0;
        double total_payment = 0.0;
        double total_weighted_rate = 0.0;
        double total_surplus = 0.0;
    };

    struct MetricsSummary
    {
        int n_drops = 0;
        int n_cells = 0;
        int n_users_per_drop = 0;
        int measured_subframes = 0;
        double cell_average_se = 0.0; // bits/s/Hz/cell
        double cell_edge_se = 0.0;    // 5th percentile of per-user average throughput
        double outage_rate = 0.0;     // failed / scheduled allocations
        std::int64_t allocations = 0;
        std::int64_t outages = 0;
        std::int64_t comp_allocations = 0;
        std::vector<double> rank_hist_all;  // fraction of allocations per rank (index rank-1)
        std::vector<double> rank_hist_comp; // same, CoMP users only
        double comp_rank_ge2_fraction = 0.0;
        double comp_user_fraction = 0.0;
        std::vector<std::int64_t> iri_hist; // reported I* over CoMP-user reports (index rank-1)
        std::int64_t comp_reports = 0;
        int modal_iri = 0;
        AuditTotals audit;
        std::uint64_t stream_checksum = 0;

        // per user, pooled over drops
        std::vector<int> user_drop, user_id, user_cell;
        std::vector<char> user_comp;
        std::vector<double> user_throughput;
    };

    // Linear-interpolation percentile (p in [0, 100]).
    double percentile(std::vector<double> values, double p);

    struct AllocationRow
    {
        int drop, subframe, cell, subband;
        sched::Role role;
        int slave_index; // 1-based position among the cluster's slave cells, 0 otherwise
        int master_rank; // L_M of the cell's cluster this subframe (0 when no master is active)
        const sched::Allocation *allocation;
        bool comp;
    };

    struct AuditRow
    {
        int drop, subframe, cell, subband;
        double weighted_rate, payment, surplus;
        bool honored;
        int victims;
    };

    // Receives per-event records during a run. Default implementations ignore everything.
    class TraceSink
    {
    public:
        virtual ~TraceSink() = default;
        virtual void allocation(const AllocationRow &) {}
        virtual void audit(const AuditRow &) {}
        virtual void message(int /*drop*/, const sched::Envelope &) {}
        virtual void cell_throughput(int /*drop*/, int /*subframe*/, int /*cell*/, double /*rate*/) {}
        virtual void report(int /*drop*/, int /*subframe*/, int /*user*/, const feedback::FeedbackReport &) {}
    };

    // Terminal reports do not depend on scheduling decisions, so arms that share feedback settings,
    // topology and channel can reuse them. Keys are produced by report_signature().
    class ReportCache
    {
    public:
        using DropReports = std::vector<std::vector<sched::ReportPtr>>; // [feedback instant][user]

        std::shared_ptr<const DropReports> find(const std::string &key) const;
        void store(const std::string &key, std::shared_ptr<const DropReports> reports);
        std::size_t size() const;

    private:
        mutable std::mutex mu_;
        std::map<std::string, std::shared_ptr<const DropReports>> map_;
    };

    std::string report_signature(const SimConfig &cfg);

    MetricsSummary run(const SimConfig &cfg, ReportCache *cache = nullptr, TraceSink *sink = nullptr);

    // Fields that may differ between the two arms of compare().
    bool comparable(const Json &a, const Json &b, std::string *why = nullptr);

} // namespace rrsim::sim
