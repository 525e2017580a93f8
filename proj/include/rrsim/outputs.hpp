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

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rrsim/config.hpp"
#include "rrsim/sim.hpp"

namespace rrsim::io
{
    // Shortest round-trip text for a double ("%.17g"); non-finite values become "nan"/"inf"/"-inf".
    std::string format_double(double v);

    // Owned stdio file with error reporting on open and write.
    class CsvFile
    {
    public:
        CsvFile() = default;
        CsvFile(const std::filesystem::path &path, const std::string &header);
        CsvFile(CsvFile &&o) noexcept;
        CsvFile &operator=(CsvFile &&o) noexcept;
        CsvFile(const CsvFile &) = delete;
        CsvFile &operator=(const CsvFile &) = delete;
        ~CsvFile();

        void row(const std::string &line);
        void close();

    private:
        std::FILE *f_ = nullptr;
        std::string path_;
    };

    // Streams per-subframe traces of a run into a directory.
    class CsvTraceSink : public sim::TraceSink
    {
    public:
        explicit CsvTraceSink(const std::filesystem::path &dir);

        void allocation(const sim::AllocationRow &row) override;
        void audit(const sim::AuditRow &row) override;
        void message(int drop, const sched::Envelope &e) override;
        void cell_throughput(int drop, int subframe, int cell, double rate) override;
        void report(int drop, int subframe, int user, const feedback::FeedbackReport &r) override;
        void close();

    private:
        CsvFile trace_, audit_, messages_, cells_, reports_;
    };

    const char *role_label(sched::Role role, int slave_index);

    Json metrics_to_json(const sim::MetricsSummary &m);
    sim::MetricsSummary metrics_from_json(const Json &j);

    void write_text(const std::filesystem::path &path, const std::string &text);
    std::string read_text(const std::filesystem::path &path);

    // Writes config.json, metrics.json, users.csv and rank_hist.csv.
    void write_summary(const std::filesystem::path &dir, const SimConfig &cfg, const sim::MetricsSummary &m);

    // Runs one configuration and writes every output (summary files plus traces) into dir.
    sim::MetricsSummary run_to_directory(const SimConfig &cfg, const std::filesystem::path &dir,
                                         sim::ReportCache *cache = nullptr, bool traces = true);

    // Paired comparison of arm B against reference arm A.
    struct RatioTable
    {
        double cell_average = 1.0;
        double cell_edge = 1.0;
        double outage = 1.0;
        std::vector<double> rank_delta_all;  // B - A per rank
        std::vector<double> rank_delta_comp; // B - A per rank, CoMP users
        double comp_rank_ge2_delta = 0.0;
    };

    // b / a, with 1 when the two are equal (including 0/0) and +inf when only a is 0.
    double safe_ratio(double b, double a);
    RatioTable ratio_table(const sim::MetricsSummary &a, const sim::MetricsSummary &b);
    Json ratio_to_json(const RatioTable &r);
    void write_ratios(const std::filesystem::path &dir, const RatioTable &r);

    struct CompareResult
    {
        sim::MetricsSummary a, b;
        RatioTable ratios;
    };

    // Runs both arms on common random numbers (same seed, drops and channels) and writes
    // dir/a, dir/b, ratios.csv and ratios.json. Throws ConfigError if the arms differ in anything
    // other than scheduler kind, receiver or cycling settings, or if their stream checksums disagree.
    CompareResult compare(const Json &config_a, const Json &config_b, std::optional<std::uint64_t> seed,
                          const std::filesystem::path &dir, sim::ReportCache *cache = nullptr, bool traces = true);

} // namespace rrsim::io
