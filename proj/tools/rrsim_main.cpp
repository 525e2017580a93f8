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

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrsim/config.hpp"
#include "rrsim/outputs.hpp"
#include "rrsim/report.hpp"
#include "rrsim/simd/dispatch.hpp"

namespace
{
    void print_summary(const char *label, const rrsim::sim::MetricsSummary &m)
    {
        std::printf("%s: cell-average %.4f, cell-edge %.4f bits/s/Hz, outage %.4f\n", label, m.cell_average_se, m.cell_edge_se, m.outage_rate);
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"rrsim: rank-coordinated multi-cell MIMO-OFDMA system-level simulator"};
    app.require_subcommand(1);

    std::string config, config_a, config_b, out, in, in_b;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool no_trace = false;

    auto *run = app.add_subcommand("run", "Run one configuration");
    run->add_option("--config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--override", overrides, "key.path=value, applied in order");
    run->add_option("--out", out, "Output directory")->required();
    run->add_flag("--no-trace", no_trace, "Skip the per-subframe traces");

    auto *cmp = app.add_subcommand("compare", "Paired run of two configurations on common random numbers");
    cmp->add_option("--config-a", config_a, "Reference configuration")->required()->check(CLI::ExistingFile);
    cmp->add_option("--config-b", config_b, "Candidate configuration")->required()->check(CLI::ExistingFile);
    cmp->add_option("--seed", seed, "Master seed for both arms (default: the configs' own seed)");
    cmp->add_option("--override", overrides, "key.path=value, applied to both arms");
    cmp->add_option("--out", out, "Output directory")->required();
    cmp->add_flag("--no-trace", no_trace, "Skip the per-subframe traces");

    std::string kind;
    auto *rep = app.add_subcommand("report", "Turn run outputs into plot-ready CSV");
    rep->add_option("kind", kind, "gain | rankhist | cdf")->required()->check(CLI::IsMember({"gain", "rankhist", "cdf"}));
    rep->add_option("--in", in, "Run output directory (reference arm for gain)")->required()->check(CLI::ExistingDirectory);
    rep->add_option("--in-b", in_b, "Second run output directory")->check(CLI::ExistingDirectory);
    rep->add_option("--out", out, "Output CSV file")->required();

    auto *defaults = app.add_subcommand("defaults", "Print the default configuration");
    auto *info = app.add_subcommand("info", "Print the selected numeric kernel set");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            const auto cfg = rrsim::load_config(config, overrides);
            const auto m = rrsim::io::run_to_directory(cfg, out, nullptr, !no_trace);
            print_summary("run", m);
        }
        else if (*cmp)
        {
            const auto ja = rrsim::load_config_json(config_a, overrides);
            const auto jb = rrsim::load_config_json(config_b, overrides);
            rrsim::sim::ReportCache cache;
            const auto r = rrsim::io::compare(ja, jb, seed, out, &cache, !no_trace);
            print_summary("a", r.a);
            print_summary("b", r.b);
            std::printf("ratios b/a: cell-average %.4f, cell-edge %.4f\n", r.ratios.cell_average, r.ratios.cell_edge);
        }
        else if (*rep)
        {
            namespace fs = std::filesystem;
            rrsim::report::FigureData fig;
            if (kind == "gain")
            {
                if (in_b.empty())
                    throw rrsim::ConfigError("report gain needs --in-b");
                const auto a = rrsim::io::metrics_from_json(rrsim::Json::parse(rrsim::io::read_text(fs::path(in) / "metrics.json")));
                const auto b = rrsim::io::metrics_from_json(rrsim::Json::parse(rrsim::io::read_text(fs::path(in_b) / "metrics.json")));
                fig = rrsim::report::make_gain_table(a, b);
            }
            else if (kind == "rankhist")
                fig = rrsim::report::make_rank_histogram(rrsim::report::read_sched_trace(fs::path(in) / "sched_trace.csv"));
            else
            {
                const auto a = rrsim::report::read_user_throughput(fs::path(in) / "users.csv");
                if (in_b.empty())
                    fig = rrsim::report::make_cdf(a);
                else
                {
                    const auto b = rrsim::report::read_user_throughput(fs::path(in_b) / "users.csv");
                    fig = rrsim::report::make_cdf(a, &b);
                }
            }
            rrsim::io::write_text(out, fig.to_csv());
        }
        else if (*defaults)
            std::cout << rrsim::default_config_json().dump(2) << "\n";
        else if (*info)
            std::cout << "kernels: " << rrsim::simd::active_kernels().name << "\n";
    }
    catch (const rrsim::ConfigError &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
