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

#include "rrsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rrsim
{
    namespace
    {
        template <class E>
        struct EnumName
        {
            E value;
            const char *name;
        };

        constexpr EnumName<topology::LayoutKind> kLayouts[] = {
            {topology::LayoutKind::ring, "ring"},
            {topology::LayoutKind::hex_grid, "hex_grid"},
            {topology::LayoutKind::explicit_positions, "explicit_positions"}};
        constexpr EnumName<channel::ErrorMode> kErrorModes[] = {{channel::ErrorMode::ideal, "ideal"}, {channel::ErrorMode::additive, "additive"}};
        constexpr EnumName<feedback::SamplingMode> kSampling[] = {{feedback::SamplingMode::exhaustive, "exhaustive"}, {feedback::SamplingMode::monte_carlo, "monte_carlo"}};
        constexpr EnumName<feedback::CqiDomain> kCqiDomains[] = {{feedback::CqiDomain::sinr_db, "sinr_db"}, {feedback::CqiDomain::rate, "rate"}};
        constexpr EnumName<phy::ReceiverStrategy> kReceivers[] = {
            {phy::ReceiverStrategy::mmse_irc_ideal, "mmse_irc_ideal"}, {phy::ReceiverStrategy::mmse_irc_simplified, "mmse_irc_simplified"}};
        constexpr EnumName<sched::SchedulerKind> kKinds[] = {
            {sched::SchedulerKind::baseline, "baseline"},
            {sched::SchedulerKind::master_slave, "master_slave"},
            {sched::SchedulerKind::baseline_with_rr_feedback, "baseline_with_rr_feedback"}};
        constexpr EnumName<sched::LinkAdaptationMode> kLinkAdaptation[] = {
            {sched::LinkAdaptationMode::static_backoff, "static"}, {sched::LinkAdaptationMode::outer_loop, "outer_loop"}};
        constexpr EnumName<sched::CyclingMode> kCycling[] = {{sched::CyclingMode::dynamic, "dynamic"}, {sched::CyclingMode::static_sequence, "static"}};
        constexpr EnumName<sched::PatternWeighting> kWeighting[] = {{sched::PatternWeighting::counts, "counts"}, {sched::PatternWeighting::weighted, "weighted"}};

        template <class E, std::size_t N>
        const char *to_name(const EnumName<E> (&table)[N], E v)
        {
            for (const auto &e : table)
                if (e.value == v)
                    return e.name;
            return "?";
        }

        template <class E, std::size_t N>
        E from_name(const EnumName<E> (&table)[N], const Json &j, const char *key)
        {
            const std::string s = j.get<std::string>();
            for (const auto &e : table)
                if (s == e.name)
                    return e.value;
            std::string allowed;
            for (const auto &e : table)
                allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
            throw ConfigError(std::string("invalid value '") + s + "' for " + key + " (expected one of: " + allowed + ")");
        }

        Json points_to_json(const std::vector<topology::Point> &pts)
        {
            Json a = Json::array();
            for (const auto &p : pts)
                a.push_back({p.x, p.y});
            return a;
        }

        std::vector<topology::Point> points_from_json(const Json &j, const char *key)
        {
            std::vector<topology::Point> out;
            for (const auto &e : j)
            {
                if (!e.is_array() || e.size() != 2)
                    throw ConfigError(std::string(key) + " entries must be [x, y]");
                out.push_back({e[0].get<double>(), e[1].get<double>()});
            }
            return out;
        }

        Json matrix_to_json(const Eigen::MatrixXcd &m)
        {
            if (m.size() == 0)
                return nullptr;
            Json rows = Json::array();
            for (int i = 0; i < m.rows(); ++i)
            {
                Json row = Json::array();
                for (int k = 0; k < m.cols(); ++k)
                    row.push_back({m(i, k).real(), m(i, k).imag()});
                rows.push_back(row);
            }
            return rows;
        }

        // Rows of [re, im] pairs (or plain real numbers).
        Eigen::MatrixXcd matrix_from_json(const Json &j, const char *key)
        {
            if (j.is_null())
                return {};
            const int n = static_cast<int>(j.size());
            Eigen::MatrixXcd m(n, n);
            for (int i = 0; i < n; ++i)
            {
                if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
                    throw ConfigError(std::string(key) + " must be a square matrix");
                for (int k = 0; k < n; ++k)
                {
                    const auto &e = j[i][k];
                    m(i, k) = e.is_array() ? cdouble(e.at(0).get<double>(), e.at(1).get<double>()) : cdouble(e.get<double>(), 0.0);
                }
            }
            return m;
        }

        Json slots_to_json(const std::vector<int> &slots)
        {
            if (slots == std::vector<int>{1, 2, 1, 2, 3})
                return "A";
            if (slots == std::vector<int>{1, 2, 1, 2, 1})
                return "B";
            return slots;
        }

        std::vector<int> slots_from_json(const Json &j)
        {
            if (j.is_string())
            {
                const auto s = j.get<std::string>();
                if (s == "A")
                    return {1, 2, 1, 2, 3};
                if (s == "B")
                    return {1, 2, 1, 2, 1};
                throw ConfigError("cycling.template must be \"A\", \"B\" or a list of priority positions");
            }
            return j.get<std::vector<int>>();
        }

        // Keys whose values are free-form (arrays or nullable) and therefore not checked structurally.
        bool is_leaf_value(const Json &schema) { return !schema.is_object(); }

        void merge_checked(Json &base, const Json &user, const std::string &path)
        {
            if (!user.is_object())
                throw ConfigError("config section '" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
            for (auto it = user.begin(); it != user.end(); ++it)
            {
                const std::string key = path.empty() ? it.key() : path + "." + it.key();
                if (!base.contains(it.key()))
                    throw ConfigError("unknown config key '" + key + "'");
                Json &slot = base[it.key()];
                if (is_leaf_value(slot))
                    slot = it.value();
                else
                    merge_checked(slot, it.value(), key);
            }
        }
    } // namespace

    double ChannelConfig::ar() const
    {
        return ar_coefficient >= 0.0 ? ar_coefficient : channel::ar_coefficient(doppler_hz);
    }

    int SimConfig::warmup_subframes() const
    {
        if (sim.warmup >= 0)
            return sim.warmup;
        return std::max(sim.feedback_delay, static_cast<int>(std::ceil(scheduler.pf_horizon)));
    }

    feedback::FeedbackConfig SimConfig::effective_feedback() const
    {
        feedback::FeedbackConfig f = feedback;
        f.mode = scheduler.kind == sched::SchedulerKind::baseline ? feedback::ReportMode::baseline
                                                                  : feedback::ReportMode::rank_recommendation;
        f.receiver = receiver;
        f.rank_min = network.rank_min;
        f.rank_max = network.rank_max;
        return f;
    }

    void SimConfig::validate() const
    {
        network.validate();
        if (ofdm.n_subbands < 1 || ofdm.subcarriers_per_subband < 1)
            throw ConfigError("ofdm: subband count and size must be >= 1");
        if (channel.coherence < 1)
            throw ConfigError("channel.coherence must be >= 1");
        if (channel.ar_coefficient > 1.0 || !(channel.doppler_hz >= 0.0))
            throw ConfigError("channel: ar_coefficient must be <= 1 and doppler_hz >= 0");
        channel.error.validate();
        // correlation matrices are checked for PSD here rather than mid-run
        if (channel.correlation.tx_matrix.size())
            channel::correlation_root(channel.correlation.tx_matrix);
        if (channel.correlation.rx_matrix.size())
            channel::correlation_root(channel.correlation.rx_matrix);
        if (sim.n_drops < 1 || sim.n_subframes < 1)
            throw ConfigError("sim: n_drops and n_subframes must be >= 1");
        if (sim.feedback_period < 1 || sim.feedback_delay < 0)
            throw ConfigError("sim: feedback_period must be >= 1 and feedback_delay >= 0");
        if (sim.n_subframes <= warmup_subframes())
            throw ConfigError("sim.n_subframes must exceed the warmup (max of feedback delay and PF horizon)");
        effective_feedback().validate(network.n_tx);
        if (codebook_bits < 0 || codebook_bits > 8)
            throw ConfigError("feedback.codebook_bits must be in [0, 8]");
        scheduler.validate();
        cycling.validate(network.rank_min, network.rank_max);
    }

    Json config_to_json(const SimConfig &c)
    {
        const auto &n = c.network;
        Json j;
        j["seed"] = c.seed;
        j["network"] = {
            {"n_cells", n.n_cells},
            {"cluster_size", n.cluster_size},
            {"users_per_cell", n.users_per_cell},
            {"inter_site_distance", n.inter_site_distance},
            {"layout", to_name(kLayouts, n.layout_kind)},
            {"wraparound", n.wraparound},
            {"sectors_per_site", n.sectors_per_site},
            {"delta_db", n.delta_db},
            {"rank_min", n.rank_min},
            {"rank_max", n.rank_max},
            {"n_tx", n.n_tx},
            {"n_rx", n.n_rx},
            {"tx_power", n.tx_power},
            {"noise_power", n.noise_power},
            {"pathloss_ref_db", n.pathloss_ref_db},
            {"pathloss_exponent", n.pathloss_exponent},
            {"shadowing_db", n.shadowing_db},
            {"min_distance", n.min_distance},
            {"sector_pattern", n.sector_pattern},
            {"background_ring", n.background_ring},
            {"background_load", n.background_load},
            {"background_association", n.background_association},
            {"cell_positions", points_to_json(n.cell_positions)},
            {"user_positions", points_to_json(n.user_positions)},
        };
        Json table = Json::array();
        for (const auto &[s, v] : c.channel.error.mse_table)
            table.push_back({s, v});
        j["channel"] = {
            {"coherence", c.channel.coherence},
            {"doppler_hz", c.channel.doppler_hz},
            {"ar_coefficient", c.channel.ar_coefficient >= 0.0 ? Json(c.channel.ar_coefficient) : Json(nullptr)},
            {"tx_correlation", c.channel.correlation.tx_rho},
            {"rx_correlation", c.channel.correlation.rx_rho},
            {"tx_correlation_matrix", matrix_to_json(c.channel.correlation.tx_matrix)},
            {"rx_correlation_matrix", matrix_to_json(c.channel.correlation.rx_matrix)},
            {"measurement_error", {{"mode", to_name(kErrorModes, c.channel.error.mode)}, {"mse_table", table}}},
        };
        j["ofdm"] = {{"n_subbands", c.ofdm.n_subbands}, {"subcarriers_per_subband", c.ofdm.subcarriers_per_subband}};
        j["sim"] = {
            {"n_drops", c.sim.n_drops},
            {"n_subframes", c.sim.n_subframes},
            {"feedback_period", c.sim.feedback_period},
            {"feedback_delay", c.sim.feedback_delay},
            {"warmup", c.sim.warmup >= 0 ? Json(c.sim.warmup) : Json(nullptr)},
        };
        const auto &f = c.feedback;
        j["feedback"] = {
            {"sampling", to_name(kSampling, f.sampling)},
            {"draws", f.draws},
            {"max_exhaustive", f.max_exhaustive},
            {"codebook_bits", c.codebook_bits},
            {"cqi_bits", f.cqi_bits},
            {"cqi_domain", to_name(kCqiDomains, f.cqi_domain)},
            {"cqi_lo", f.cqi_lo},
            {"cqi_hi", f.cqi_hi},
            {"delta_cqi", f.delta_cqi},
            {"delta_bits", f.delta_bits},
            {"delta_hi", f.delta_hi},
            {"backoff_db", f.backoff_db},
            {"rate_cap", f.rate_cap},
            {"per_cell_iri", f.per_cell_iri},
            {"tie_tolerance", f.tie_tolerance},
        };
        j["receiver"] = {{"strategy", to_name(kReceivers, c.receiver)}};
        j["scheduler"] = {
            {"kind", to_name(kKinds, c.scheduler.kind)},
            {"pf_horizon", c.scheduler.pf_horizon},
            {"pf_epsilon", c.scheduler.pf_epsilon},
            {"latency_rank_request", c.scheduler.latency.rank_request},
            {"latency_pattern_broadcast", c.scheduler.latency.pattern_broadcast},
            {"latency_master_state", c.scheduler.latency.master_state},
            {"link_adaptation", to_name(kLinkAdaptation, c.scheduler.link_adaptation.mode)},
            {"olla_ack_step_db", c.scheduler.link_adaptation.ack_step_db},
            {"olla_nack_step_db", c.scheduler.link_adaptation.nack_step_db},
            {"olla_min_offset_db", c.scheduler.link_adaptation.min_offset_db},
            {"olla_max_offset_db", c.scheduler.link_adaptation.max_offset_db},
        };
        j["cycling"] = {
            {"mode", to_name(kCycling, c.cycling.mode)},
            {"template", slots_to_json(c.cycling.slots)},
            {"static_sequence", c.cycling.static_sequence},
            {"update_period", c.cycling.update_period},
            {"weighting", to_name(kWeighting, c.cycling.weighting)},
        };
        return j;
    }

    Json default_config_json() { return config_to_json(SimConfig{}); }

    SimConfig config_from_json(const Json &user)
    {
        Json j = default_config_json();
        merge_checked(j, user, "");
        SimConfig c;
        std::string where;
        try
        {
            auto sec = [&](const char *s) -> const Json & { where = s; return j.at(s); };
            c.seed = j.at("seed").get<std::uint64_t>();

            const Json &n = sec("network");
            auto &nc = c.network;
            nc.n_cells = n.at("n_cells").get<int>();
            nc.cluster_size = n.at("cluster_size").get<int>();
            nc.users_per_cell = n.at("users_per_cell").get<int>();
            nc.inter_site_distance = n.at("inter_site_distance").get<double>();
            nc.layout_kind = from_name(kLayouts, n.at("layout"), "network.layout");
            nc.wraparound = n.at("wraparound").get<bool>();
            nc.sectors_per_site = n.at("sectors_per_site").get<int>();
            nc.delta_db = n.at("delta_db").get<double>();
            nc.rank_min = n.at("rank_min").get<int>();
            nc.rank_max = n.at("rank_max").get<int>();
            nc.n_tx = n.at("n_tx").get<int>();
            nc.n_rx = n.at("n_rx").get<int>();
            nc.tx_power = n.at("tx_power").get<double>();
            nc.noise_power = n.at("noise_power").get<double>();
            nc.pathloss_ref_db = n.at("pathloss_ref_db").get<double>();
            nc.pathloss_exponent = n.at("pathloss_exponent").get<double>();
            nc.shadowing_db = n.at("shadowing_db").get<double>();
            nc.min_distance = n.at("min_distance").get<double>();
            nc.sector_pattern = n.at("sector_pattern").get<bool>();
            nc.background_ring = n.at("background_ring").get<bool>();
            nc.background_load = n.at("background_load").get<double>();
            nc.background_association = n.at("background_association").get<bool>();
            nc.cell_positions = points_from_json(n.at("cell_positions"), "network.cell_positions");
            nc.user_positions = points_from_json(n.at("user_positions"), "network.user_positions");

            const Json &ch = sec("channel");
            c.channel.coherence = ch.at("coherence").get<int>();
            c.channel.doppler_hz = ch.at("doppler_hz").get<double>();
            c.channel.ar_coefficient = ch.at("ar_coefficient").is_null() ? -1.0 : ch.at("ar_coefficient").get<double>();
            if (!ch.at("ar_coefficient").is_null() && c.channel.ar_coefficient < 0.0)
                throw ConfigError("channel.ar_coefficient must be in [0, 1]");
            c.channel.correlation.tx_rho = ch.at("tx_correlation").get<double>();
            c.channel.correlation.rx_rho = ch.at("rx_correlation").get<double>();
            c.channel.correlation.tx_matrix = matrix_from_json(ch.at("tx_correlation_matrix"), "channel.tx_correlation_matrix");
            c.channel.correlation.rx_matrix = matrix_from_json(ch.at("rx_correlation_matrix"), "channel.rx_correlation_matrix");
            const Json &me = ch.at("measurement_error");
            if (!me.is_object())
                throw ConfigError("channel.measurement_error must be an object");
            c.channel.error.mode = from_name(kErrorModes, me.at("mode"), "channel.measurement_error.mode");
            for (const auto &e : me.at("mse_table"))
            {
                if (!e.is_array() || e.size() != 2)
                    throw ConfigError("mse_table entries must be [sinr_db, variance]");
                c.channel.error.mse_table.push_back({e[0].get<double>(), e[1].get<double>()});
            }

            const Json &o = sec("ofdm");
            c.ofdm.n_subbands = o.at("n_subbands").get<int>();
            c.ofdm.subcarriers_per_subband = o.at("subcarriers_per_subband").get<int>();

            const Json &s = sec("sim");
            c.sim.n_drops = s.at("n_drops").get<int>();
            c.sim.n_subframes = s.at("n_subframes").get<int>();
            c.sim.feedback_period = s.at("feedback_period").get<int>();
            c.sim.feedback_delay = s.at("feedback_delay").get<int>();
            c.sim.warmup = s.at("warmup").is_null() ? -1 : s.at("warmup").get<int>();

            const Json &f = sec("feedback");
            auto &fc = c.feedback;
            fc.sampling = from_name(kSampling, f.at("sampling"), "feedback.sampling");
            fc.draws = f.at("draws").get<int>();
            fc.max_exhaustive = f.at("max_exhaustive").get<int>();
            c.codebook_bits = f.at("codebook_bits").get<int>();
            fc.cqi_bits = f.at("cqi_bits").get<int>();
            fc.cqi_domain = from_name(kCqiDomains, f.at("cqi_domain"), "feedback.cqi_domain");
            fc.cqi_lo = f.at("cqi_lo").get<double>();
            fc.cqi_hi = f.at("cqi_hi").get<double>();
            fc.delta_cqi = f.at("delta_cqi").get<bool>();
            fc.delta_bits = f.at("delta_bits").get<int>();
            fc.delta_hi = f.at("delta_hi").get<double>();
            fc.backoff_db = f.at("backoff_db").get<double>();
            fc.rate_cap = f.at("rate_cap").get<double>();
            fc.per_cell_iri = f.at("per_cell_iri").get<bool>();
            fc.tie_tolerance = f.at("tie_tolerance").get<double>();

            c.receiver = from_name(kReceivers, sec("receiver").at("strategy"), "receiver.strategy");

            const Json &sc = sec("scheduler");
            c.scheduler.kind = from_name(kKinds, sc.at("kind"), "scheduler.kind");
            c.scheduler.pf_horizon = sc.at("pf_horizon").get<double>();
            c.scheduler.pf_epsilon = sc.at("pf_epsilon").get<double>();
            c.scheduler.latency.rank_request = sc.at("latency_rank_request").get<int>();
            c.scheduler.latency.pattern_broadcast = sc.at("latency_pattern_broadcast").get<int>();
            c.scheduler.latency.master_state = sc.at("latency_master_state").get<int>();
            auto &la = c.scheduler.link_adaptation;
            la.mode = from_name(kLinkAdaptation, sc.at("link_adaptation"), "scheduler.link_adaptation");
            la.ack_step_db = sc.at("olla_ack_step_db").get<double>();
            la.nack_step_db = sc.at("olla_nack_step_db").get<double>();
            la.min_offset_db = sc.at("olla_min_offset_db").get<double>();
            la.max_offset_db = sc.at("olla_max_offset_db").get<double>();

            const Json &cy = sec("cycling");
            c.cycling.mode = from_name(kCycling, cy.at("mode"), "cycling.mode");
            c.cycling.slots = slots_from_json(cy.at("template"));
            c.cycling.static_sequence = cy.at("static_sequence").get<std::vector<int>>();
            c.cycling.update_period = cy.at("update_period").get<int>();
            c.cycling.weighting = from_name(kWeighting, cy.at("weighting"), "cycling.weighting");
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError("config type error in section '" + where + "': " + e.what());
        }
        c.validate();
        return c;
    }

    void apply_override(Json &j, std::string_view assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ConfigError("override must look like key.path=value: '" + std::string(assignment) + "'");
        const std::string path(assignment.substr(0, eq));
        const std::string text(assignment.substr(eq + 1));
        Json value = Json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;
        Json *node = &j;
        std::size_t start = 0;
        for (;;)
        {
            const auto dot = path.find('.', start);
            const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (key.empty())
                throw ConfigError("empty key in override '" + path + "'");
            if (dot == std::string::npos)
            {
                (*node)[key] = value;
                return;
            }
            Json &child = (*node)[key];
            if (child.is_null())
                child = Json::object();
            if (!child.is_object())
                throw ConfigError("override path '" + path + "' crosses a non-object value");
            node = &child;
            start = dot + 1;
        }
    }

    Json load_config_json(const std::string &path, std::span<const std::string> overrides)
    {
        Json j = Json::object();
        if (!path.empty())
        {
            std::ifstream in(path);
            if (!in)
                throw ConfigError("cannot open config file '" + path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            j = Json::parse(ss.str(), nullptr, false, true);
            if (j.is_discarded())
                throw ConfigError("config file '" + path + "' is not valid JSON");
        }
        for (const auto &o : overrides)
            apply_override(j, o);
        return j;
    }

    SimConfig load_config(const std::string &path, std::span<const std::string> overrides)
    {
        return config_from_json(load_config_json(path, overrides));
    }

} // namespace rrsim
