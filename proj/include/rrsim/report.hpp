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

#include <filesystem>
#include <string>
#include <vector>

#include "rrsim/sim.hpp"

namespace rrsim::report
{
    enum class FigureKind
    {
        gain_bars,
        rank_histogram,
        cdf
    };

    const char *figure_kind_name(FigureKind k);

    // Plot-ready table: an optional text label column followed by equal-length numeric columns.
    struct FigureData
    {
        FigureKind kind = FigureKind::gain_bars;
        std::string label_header;        // empty: no label column
        std::vector<std::string> labels; // one per row when label_header is set
        std::vector<std::string> headers;
        std::vector<std::vector<double>> columns;

        std::size_t rows() const { return columns.empty() ? labels.size() : columns.front().size(); }
        void validate() const; // throws std::invalid_argument
        std::string to_csv() const;
    };

    // Percentage deltas of B over reference A for cell-average and cell-edge throughput.
    FigureData make_gain_table(const sim::MetricsSummary &a, const sim::MetricsSummary &b);

    struct TraceAllocation
    {
        int user = -1;
        int rank = 0;
        bool comp = false;
    };

    // Reads the allocation rows of a sched_trace.csv (idle subbands included as user -1).
    std::vector<TraceAllocation> read_sched_trace(const std::filesystem::path &path);

    // Fraction of scheduled allocations per rank, overall and for CoMP users.
    FigureData make_rank_histogram(const std::vector<TraceAllocation> &trace, int max_rank = 4);

    // Per-user throughputs from users.csv.
    std::vector<double> read_user_throughput(const std::filesystem::path &path);

    // Empirical CDF (sorted values, cumulative probability (i+1)/n); the optional second series must
    // have the same number of users and is sorted independently.
    FigureData make_cdf(const std::vector<double> &a, const std::vector<double> *b = nullptr);

} // namespace rrsim::report
