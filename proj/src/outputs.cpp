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

#include "rrsim/outputs.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rrsim::io
{
    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    CsvFile::CsvFile(const std::filesystem::path &path, const std::string &header) : path_(path.string())
    {
        f_ = std::fopen(path_.c_str(), "w");
        if (!f_)
            throw std::runtime_error("cannot open " + path_ + ": " + std::strerror(errno));
        row(header);
    }

    CsvFile::CsvFile(CsvFile &&o) noexcept : f_(o.f_), path_(std::move(o.path_)) { o.f_ = nullptr; }

    CsvFile &CsvFile::operator=(CsvFile &&o) noexcept
    {
        if (this != &o)
        {
            if (f_)
                std::fclose(f_);
            f_ = o.f_;
            path_ = std::move(o.path_);
            o.f_ = nullptr;
        }
        return *this;
    }

    CsvFile::~CsvFile()
    {
        if (f_)
            std::fclose(f_);
    }

    void CsvFile::row(const std::string &line)
    {
        if (!f_)
            throw std::logic_error("write to a closed CSV file");
        if (std::fputs(line.c_str(), f_) < 0 || std::fputc('\n', f_) == EOF)
            throw std::runtime_error("write failed: " + path_);
    }

    void CsvFile::close()
    {
        if (f_ && std::fclose(f_) != 0)
        {
            f_ = nullptr;
            throw std::runtime_error("close failed: " + path_);
        }
        f_ = nullptr;
    }

    namespace
    {
        template <typename... Ts>
        std::string join(const Ts &...parts)
        {
            std::string out;
            auto add = [&](const auto &p)
            {
                if (!out.empty())
                    out += ',';
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, double>)
                    out += format_double(p);
                else if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, const char *>)
                    out += p;
                else
                    out += std::to_string(p);
            };
            (add(parts), ...);
            return out;
        }

        std::string join_ints(const std::vector<int> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? " " : "") + std::to_string(v[i]);
            return out;
        }
    } // namespace

    const char *role_label(sched::Role role, int slave_index)
    {
        switch (role)
        {
        case sched::Role::master:
            return "M";
        case sched::Role::slave:
            return slave_index == 1 ? "S1" : slave_index == 2 ? "S2" : "S";
        default:
            return "-";
        }
    }

    CsvTraceSink::CsvTraceSink(const std::filesystem::path &dir)
        : trace_(dir / "sched_trace.csv", "drop,subframe,cell,role,master_rank,subband,user,rank,pmi,group,comp,scheduled_rate,realized_rate"),
          audit_(dir / "audit.csv", "drop,subframe,cell,subband,weighted_rate,payment,surplus,honored,victims"),
          messages_(dir / "messages.csv", "drop,seq,kind,send,deliver,detail"),
          cells_(dir / "cell_throughput.csv", "drop,subframe,cell,throughput"),
          reports_(dir / "reports.csv", "drop,subframe,user,serving_ri,recommended_iri,pmi,cqi")
    {
    }

    void CsvTraceSink::allocation(const sim::AllocationRow &r)
    {
        const auto &a = *r.allocation;
        trace_.row(join(r.drop, r.subframe, r.cell, role_label(r.role, r.slave_index), r.master_rank, r.subband, a.user, a.rank, a.pmi,
                        sched::group_name(a.group), static_cast<int>(r.comp), a.scheduled, a.realized));
    }

    void CsvTraceSink::audit(const sim::AuditRow &r)
    {
        audit_.row(join(r.drop, r.subframe, r.cell, r.subband, r.weighted_rate, r.payment, r.surplus, static_cast<int>(r.honored), r.victims));
    }

    void CsvTraceSink::message(int drop, const sched::Envelope &e)
    {
        std::string detail;
        if (const auto *m = std::get_if<sched::RankRequest>(&e.message))
            detail = "victim=" + std::to_string(m->victim) + " from=" + std::to_string(m->victim_cell) + " to=" + std::to_string(m->target_cell) +
                     " iri=" + std::to_string(m->iri) + " w=" + format_double(m->w_tilde);
        else if (const auto *m = std::get_if<sched::PatternBroadcast>(&e.message))
            detail = "cell=" + std::to_string(m->cell) + " priority=" + join_ints(m->priority) + " sequence=" + join_ints(m->sequence);
        else if (const auto *m = std::get_if<sched::MasterState>(&e.message))
            detail = "cluster=" + std::to_string(m->cluster) + " master=" + std::to_string(m->master) + " subframe=" + std::to_string(m->subframe) +
                     " rank=" + std::to_string(m->rank) + " state=" + std::to_string(static_cast<int>(m->state));
        messages_.row(join(drop, static_cast<long long>(e.seq), sched::kind_name(e.message), e.send, e.deliver, detail));
    }

    void CsvTraceSink::cell_throughput(int drop, int subframe, int cell, double rate) { cells_.row(join(drop, subframe, cell, rate)); }

    void CsvTraceSink::report(int drop, int subframe, int user, const feedback::FeedbackReport &r)
    {
        reports_.row(join(drop, subframe, user, r.serving_ri, r.recommended_iri, join_ints(r.pmi), join_ints(r.cqi)));
    }

    void CsvTraceSink::close()
    {
        reports_.close();
        trace_.close();
        audit_.close();
        messages_.close();
        cells_.close();
    }

    Json metrics_to_json(const sim::MetricsSummary &m)
    {
        char checksum[24];
        std::snprintf(checksum, sizeof checksum, "%016llx", static_cast<unsigned long long>(m.stream_checksum));
        Json j;
        j["n_drops"] = m.n_drops;
        j["n_cells"] = m.n_cells;
        j["n_users_per_drop"] = m.n_users_per_drop;
        j["measured_subframes"] = m.measured_subframes;
        j["cell_average_se"] = m.cell_average_se;
        j["cell_edge_se"] = m.cell_edge_se;
        j["outage_rate"] = m.outage_rate;
        j["allocations"] = m.allocations;
        j["outages"] = m.outages;
        j["comp_allocations"] = m.comp_allocations;
        j["rank_hist_all"] = m.rank_hist_all;
        j["rank_hist_comp"] = m.rank_hist_comp;
        j["comp_rank_ge2_fraction"] = m.comp_rank_ge2_fraction;
        j["comp_user_fraction"] = m.comp_user_fraction;
        j["iri_hist"] = m.iri_hist;
        j["comp_reports"] = m.comp_reports;
        j["modal_iri"] = m.modal_iri;
        j["audit"] = {{"us1_checks", m.audit.us1_checks},
                      {"violations", m.audit.violations},
                      {"concavity_violations", m.audit.concavity_violations},
                      {"total_payment", m.audit.total_payment},
                      {"total_weighted_rate", m.audit.total_weighted_rate},
                      {"total_surplus", m.audit.total_surplus}};
        j["stream_checksum"] = checksum;
        return j;
    }

    sim::MetricsSummary metrics_from_json(const Json &j)
    {
        try
        {
            sim::MetricsSummary m;
            m.n_drops = j.at("n_drops").get<int>();
            m.n_cells = j.at("n_cells").get<int>();
            m.n_users_per_drop = j.at("n_users_per_drop").get<int>();
            m.measured_subframes = j.at("measured_subframes").get<int>();
            m.cell_average_se = j.at("cell_average_se").get<double>();
            m.cell_edge_se = j.at("cell_edge_se").get<double>();
            m.outage_rate = j.at("outage_rate").get<double>();
            m.allocations = j.at("allocations").get<std::int64_t>();
            m.outages = j.at("outages").get<std::int64_t>();
            m.comp_allocations = j.at("comp_allocations").get<std::int64_t>();
            m.rank_hist_all = j.at("rank_hist_all").get<std::vector<double>>();
            m.rank_hist_comp = j.at("rank_hist_comp").get<std::vector<double>>();
            m.comp_rank_ge2_fraction = j.at("comp_rank_ge2_fraction").get<double>();
            m.comp_user_fraction = j.at("comp_user_fraction").get<double>();
            m.iri_hist = j.at("iri_hist").get<std::vector<std::int64_t>>();
            m.comp_reports = j.at("comp_reports").get<std::int64_t>();
            m.modal_iri = j.at("modal_iri").get<int>();
            const auto &a = j.at("audit");
            m.audit.us1_checks = a.at("us1_checks").get<std::int64_t>();
            m.audit.violations = a.at("violations").get<std::int64_t>();
            m.audit.concavity_violations = a.at("concavity_violations").get<std::int64_t>();
            m.audit.total_payment = a.at("total_payment").get<double>();
            m.audit.total_weighted_rate = a.at("total_weighted_rate").get<double>();
            m.audit.total_surplus = a.at("total_surplus").get<double>();
            m.stream_checksum = std::stoull(j.at("stream_checksum").get<std::string>(), nullptr, 16);
            return m;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("malformed metrics: ") + e.what());
        }
    }

    void write_text(const std::filesystem::path &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
    }

    std::string read_text(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_summary(const std::filesystem::path &dir, const SimConfig &cfg, const sim::MetricsSummary &m)
    {
        write_text(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
        write_text(dir / "metrics.json", metrics_to_json(m).dump(2) + "\n");
        CsvFile users(dir / "users.csv", "drop,user,cell,comp,throughput");
        for (std::size_t i = 0; i < m.user_throughput.size(); ++i)
            users.row(join(m.user_drop[i], m.user_id[i], m.user_cell[i], static_cast<int>(m.user_comp[i]), m.user_throughput[i]));
        users.close();
        CsvFile hist(dir / "rank_hist.csv", "rank,all,comp");
        for (std::size_t r = 0; r < m.rank_hist_all.size(); ++r)
            hist.row(join(static_cast<int>(r + 1), m.rank_hist_all[r], m.rank_hist_comp[r]));
        hist.close();
    }

    sim::MetricsSummary run_to_directory(const SimConfig &cfg, const std::filesystem::path &dir, sim::ReportCache *cache, bool traces)
    {
        cfg.validate();
        std::filesystem::create_directories(dir);
        std::optional<CsvTraceSink> sink;
        if (traces)
            sink.emplace(dir);
        const auto m = sim::run(cfg, cache, sink ? &*sink : nullptr);
        if (sink)
            sink->close();
        write_summary(dir, cfg, m);
        return m;
    }

    double safe_ratio(double b, double a)
    {
        if (b == a)
            return 1.0;
        if (a == 0.0)
            return b > 0 ? INFINITY : -INFINITY;
        return b / a;
    }

    RatioTable ratio_table(const sim::MetricsSummary &a, const sim::MetricsSummary &b)
    {
        if (a.rank_hist_all.size() != b.rank_hist_all.size() || a.n_drops != b.n_drops || a.user_throughput.size() != b.user_throughput.size())
            throw ConfigError("summaries come from different run shapes");
        RatioTable r;
        r.cell_average = safe_ratio(b.cell_average_se, a.cell_average_se);
        r.cell_edge = safe_ratio(b.cell_edge_se, a.cell_edge_se);
        r.outage = safe_ratio(b.outage_rate, a.outage_rate);
        for (std::size_t i = 0; i < a.rank_hist_all.size(); ++i)
        {
            r.rank_delta_all.push_back(b.rank_hist_all[i] - a.rank_hist_all[i]);
            r.rank_delta_comp.push_back(b.rank_hist_comp[i] - a.rank_hist_comp[i]);
        }
        r.comp_rank_ge2_delta = b.comp_rank_ge2_fraction - a.comp_rank_ge2_fraction;
        return r;
    }

    Json ratio_to_json(const RatioTable &r)
    {
        auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(format_double(v)); };
        Json j;
        j["cell_average_ratio"] = num(r.cell_average);
        j["cell_edge_ratio"] = num(r.cell_edge);
        j["outage_ratio"] = num(r.outage);
        j["rank_delta_all"] = r.rank_delta_all;
        j["rank_delta_comp"] = r.rank_delta_comp;
        j["comp_rank_ge2_delta"] = r.comp_rank_ge2_delta;
        return j;
    }

    void write_ratios(const std::filesystem::path &dir, const RatioTable &r)
    {
        write_text(dir / "ratios.json", ratio_to_json(r).dump(2) + "\n");
        CsvFile csv(dir / "ratios.csv", "metric,value");
        csv.row(join(std::string("cell_average_ratio"), r.cell_average));
        csv.row(join(std::string("cell_edge_ratio"), r.cell_edge));
        csv.row(join(std::string("outage_ratio"), r.outage));
        for (std::size_t i = 0; i < r.rank_delta_all.size(); ++i)
            csv.row(join("rank" + std::to_string(i + 1) + "_delta_all", r.rank_delta_all[i]));
        for (std::size_t i = 0; i < r.rank_delta_comp.size(); ++i)
            csv.row(join("rank" + std::to_string(i + 1) + "_delta_comp", r.rank_delta_comp[i]));
        csv.row(join(std::string("comp_rank_ge2_delta"), r.comp_rank_ge2_delta));
        csv.close();
    }

    CompareResult compare(const Json &config_a, const Json &config_b, std::optional<std::uint64_t> seed, const std::filesystem::path &dir,
                          sim::ReportCache *cache, bool traces)
    {
        Json ja = config_a, jb = config_b;
        if (seed)
            ja["seed"] = jb["seed"] = *seed;
        std::string why;
        if (!sim::comparable(ja, jb, &why))
            throw ConfigError("arms are not comparable: " + why);
        const SimConfig ca = config_from_json(ja), cb = config_from_json(jb);
        ca.validate();
        cb.validate();
        CompareResult out;
        out.a = run_to_directory(ca, dir / "a", cache, traces);
        out.b = run_to_directory(cb, dir / "b", cache, traces);
        if (out.a.stream_checksum != out.b.stream_checksum)
            throw std::runtime_error("arms consumed different channel streams");
        out.ratios = ratio_table(out.a, out.b);
        write_ratios(dir, out.ratios);
        return out;
    }

} // namespace rrsim::io
