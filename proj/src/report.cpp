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

#include "rrsim/report.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rrsim/outputs.hpp"

namespace rrsim::report
{
    const char *figure_kind_name(FigureKind k)
    {
        switch (k)
        {
        case FigureKind::gain_bars:
            return "gain_bars";
        case FigureKind::rank_histogram:
            return "rank_histogram";
        default:
            return "cdf";
        }
    }

    void FigureData::validate() const
    {
        if (headers.size() != columns.size())
            throw std::invalid_argument("one header per column expected");
        std::set<std::string> seen;
        if (!label_header.empty())
            seen.insert(label_header);
        for (const auto &h : headers)
            if (!seen.insert(h).second)
                throw std::invalid_argument("duplicate column label: " + h);
        for (const auto &c : columns)
            if (c.size() != rows())
                throw std::invalid_argument("columns differ in length");
        if (!label_header.empty() && labels.size() != rows())
            throw std::invalid_argument("one row label per row expected");
        if (label_header.empty() && !labels.empty())
            throw std::invalid_argument("row labels without a label column");
    }

    std::string FigureData::to_csv() const
    {
        validate();
        std::string out;
        std::vector<std::string> head;
        if (!label_header.empty())
            head.push_back(label_header);
        head.insert(head.end(), headers.begin(), headers.end());
        for (std::size_t i = 0; i < head.size(); ++i)
            out += (i ? "," : "") + head[i];
        out += '\n';
        for (std::size_t r = 0; r < rows(); ++r)
        {
            bool first = true;
            if (!label_header.empty())
            {
                out += labels[r];
                first = false;
            }
            for (const auto &c : columns)
            {
                if (!first)
                    out += ',';
                out += io::format_double(c[r]);
                first = false;
            }
            out += '\n';
        }
        return out;
    }

    FigureData make_gain_table(const sim::MetricsSummary &a, const sim::MetricsSummary &b)
    {
        if (a.n_drops != b.n_drops || a.n_cells != b.n_cells || a.n_users_per_drop != b.n_users_per_drop ||
            a.measured_subframes != b.measured_subframes || a.stream_checksum != b.stream_checksum)
            throw std::invalid_argument("gain table needs paired runs");
        FigureData f;
        f.kind = FigureKind::gain_bars;
        f.label_header = "metric";
        f.labels = {"cell_average", "cell_edge"};
        f.headers = {"reference", "candidate", "gain_percent"};
        const double ra = a.cell_average_se, rb = b.cell_average_se, ea = a.cell_edge_se, eb = b.cell_edge_se;
        f.columns = {{ra, ea}, {rb, eb}, {(io::safe_ratio(rb, ra) - 1.0) * 100.0, (io::safe_ratio(eb, ea) - 1.0) * 100.0}};
        return f;
    }

    namespace
    {
        std::vector<std::string> split(const std::string &line)
        {
            std::vector<std::string> out;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                out.push_back(cell);
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        struct Table
        {
            std::vector<std::string> header;
            std::vector<std::vector<std::string>> rows;

            std::size_t col(const std::string &name) const
            {
                const auto it = std::find(header.begin(), header.end(), name);
                if (it == header.end())
                    throw std::runtime_error("missing column '" + name + "'");
                return static_cast<std::size_t>(it - header.begin());
            }
        };

        Table read_csv(const std::filesystem::path &path)
        {
            std::ifstream in(path);
            if (!in)
                throw std::runtime_error("cannot read " + path.string());
            Table t;
            std::string line;
            if (!std::getline(in, line))
                throw std::runtime_error(path.string() + " is empty");
            t.header = split(line);
            while (std::getline(in, line))
            {
                if (line.empty())
                    continue;
                auto row = split(line);
                if (row.size() < t.header.size())
                    throw std::runtime_error(path.string() + ": short row");
                t.rows.push_back(std::move(row));
            }
            return t;
        }
    } // namespace

    std::vector<TraceAllocation> read_sched_trace(const std::filesystem::path &path)
    {
        const Table t = read_csv(path);
        const auto cu = t.col("user"), cr = t.col("rank"), cc = t.col("comp");
        std::vector<TraceAllocation> out;
        out.reserve(t.rows.size());
        for (const auto &r : t.rows)
            out.push_back({std::stoi(r[cu]), std::stoi(r[cr]), r[cc] == "1"});
        return out;
    }

    FigureData make_rank_histogram(const std::vector<TraceAllocation> &trace, int max_rank)
    {
        if (max_rank < 1)
            throw std::invalid_argument("max_rank must be positive");
        std::vector<double> all(max_rank, 0.0), comp(max_rank, 0.0);
        double n_all = 0, n_comp = 0;
        for (const auto &a : trace)
        {
            if (a.user < 0)
                continue;
            if (a.rank < 1 || a.rank > max_rank)
                throw std::invalid_argument("allocation rank out of range");
            all[a.rank - 1] += 1;
            n_all += 1;
            if (a.comp)
            {
                comp[a.rank - 1] += 1;
                n_comp += 1;
            }
        }
        if (n_all == 0)
            throw std::invalid_argument("trace has no scheduled allocations");
        FigureData f;
        f.kind = FigureKind::rank_histogram;
        f.headers = {"rank", "all", "comp"};
        std::vector<double> ranks(max_rank);
        for (int r = 0; r < max_rank; ++r)
        {
            ranks[r] = r + 1;
            all[r] /= n_all;
            comp[r] = n_comp > 0 ? comp[r] / n_comp : 0.0;
        }
        f.columns = {ranks, all, comp};
        return f;
    }

    std::vector<double> read_user_throughput(const std::filesystem::path &path)
    {
        const Table t = read_csv(path);
        const auto c = t.col("throughput");
        std::vector<double> out;
        for (const auto &r : t.rows)
            out.push_back(std::stod(r[c]));
        return out;
    }

    FigureData make_cdf(const std::vector<double> &a, const std::vector<double> *b)
    {
        if (a.empty())
            throw std::invalid_argument("no users");
        if (b && b->size() != a.size())
            throw std::invalid_argument("paired CDFs need equal user counts");
        FigureData f;
        f.kind = FigureKind::cdf;
        std::vector<double> sa = a, p(a.size());
        std::sort(sa.begin(), sa.end());
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = static_cast<double>(i + 1) / static_cast<double>(p.size());
        f.headers = {"probability", b ? "throughput_a" : "throughput"};
        f.columns = {p, sa};
        if (b)
        {
            std::vector<double> sb = *b;
            std::sort(sb.begin(), sb.end());
            f.headers.push_back("throughput_b");
            f.columns.push_back(sb);
        }
        return f;
    }

} // namespace rrsim::report
