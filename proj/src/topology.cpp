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

#include "rrsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rrsim/rng.hpp"

namespace rrsim::topology
{
    namespace
    {
        constexpr double kSqrt3 = 1.7320508075688772;

        Point rotate(Point p, double deg)
        {
            const double a = deg * std::numbers::pi / 180.0;
            return {p.x * std::cos(a) - p.y * std::sin(a), p.x * std::sin(a) + p.y * std::cos(a)};
        }

        // Lattice points u*a1 + v*a2 with hex distance <= tiers, centre first, then by ring and angle.
        std::vector<Point> hex_sites(double isd, int tiers)
        {
            struct Cand
            {
                int ring;
                double angle;
                Point p;
            };
            std::vector<Cand> c;
            for (int u = -tiers; u <= tiers; ++u)
                for (int v = -tiers; v <= tiers; ++v)
                {
                    const int ring = std::max({std::abs(u), std::abs(v), std::abs(u + v)});
                    if (ring > tiers)
                        continue;
                    Point p{isd * (u + 0.5 * v), isd * 0.5 * kSqrt3 * v};
                    double ang = std::atan2(p.y, p.x);
                    if (ang < 0.0)
                        ang += 2.0 * std::numbers::pi;
                    c.push_back({ring, ring == 0 ? 0.0 : ang, p});
                }
            std::sort(c.begin(), c.end(), [](const Cand &a, const Cand &b)
                      { return a.ring != b.ring ? a.ring < b.ring : a.angle < b.angle - 1e-12; });
            std::vector<Point> out;
            for (const auto &x : c)
                out.push_back(x.p);
            return out;
        }

        // Uniform point in the pointy-top hexagon of inradius isd/2 around `centre`, at least min_d away.
        Point drop_in_hexagon(Engine &rng, Point centre, double isd, double min_d)
        {
            const double r_in = 0.5 * isd;
            const double r_out = isd / kSqrt3;
            std::uniform_real_distribution<double> ux(-r_in, r_in), uy(-r_out, r_out);
            for (;;)
            {
                const Point p{ux(rng), uy(rng)};
                bool inside = true;
                for (double deg : {0.0, 60.0, 120.0})
                {
                    const double a = deg * std::numbers::pi / 180.0;
                    if (std::abs(p.x * std::cos(a) + p.y * std::sin(a)) > r_in)
                        inside = false;
                }
                if (inside && std::hypot(p.x, p.y) >= min_d)
                    return {centre.x + p.x, centre.y + p.y};
            }
        }

        double sector_gain_db(double boresight_deg, Point site, Point user)
        {
            if (std::isnan(boresight_deg))
                return 0.0;
            double theta = std::atan2(user.y - site.y, user.x - site.x) * 180.0 / std::numbers::pi - boresight_deg;
            theta = std::remainder(theta, 360.0);
            return -std::min(12.0 * (theta / 70.0) * (theta / 70.0), 20.0);
        }
    } // namespace

    void NetworkConfig::validate() const
    {
        if (n_cells < 1)
            throw ConfigError("network.n_cells must be >= 1");
        if (cluster_size < 1 || n_cells % cluster_size != 0)
            throw ConfigError("network.cluster_size must divide network.n_cells");
        if (n_tx < 1 || n_tx > kMaxAntennas || n_rx < 1 || n_rx > kMaxAntennas)
            throw ConfigError("antenna counts must be in [1, " + std::to_string(kMaxAntennas) + "]");
        if (rank_min < 1 || rank_min > rank_max || rank_max > n_tx)
            throw ConfigError("rank bounds must satisfy 1 <= rank_min <= rank_max <= n_tx");
        if (!(delta_db > -300.0) || !std::isfinite(delta_db))
            throw ConfigError("network.delta_db must be finite");
        if (!(tx_power > 0.0) || !(noise_power > 0.0))
            throw ConfigError("tx_power and noise_power must be positive");
        if (!(min_distance > 0.0))
            throw ConfigError("network.min_distance must be positive");
        if (layout_kind != LayoutKind::explicit_positions && !(inter_site_distance > 0.0))
            throw ConfigError("invalid geometry: inter_site_distance must be positive");
        if (layout_kind == LayoutKind::hex_grid)
        {
            if (sectors_per_site != 1 && sectors_per_site != 3)
                throw ConfigError("hex_grid supports 1 or 3 sectors per site");
            if (n_cells != 19 * sectors_per_site)
                throw ConfigError("hex_grid requires n_cells = 19 * sectors_per_site");
        }
        if (layout_kind == LayoutKind::explicit_positions)
        {
            if (static_cast<int>(cell_positions.size()) != n_cells)
                throw ConfigError("invalid geometry: explicit cell_positions must list n_cells points");
            if (user_positions.empty())
                throw ConfigError("zero users: explicit user_positions is empty");
        }
        else if (users_per_cell < 1)
            throw ConfigError("zero users: users_per_cell must be >= 1");
    }

    bool CompSets::in_measurement_set(int user, int cell) const
    {
        const auto &m = measurement_set[user];
        return std::binary_search(m.begin(), m.end(), cell);
    }

    double link_distance(const Positions &positions, Point user, Point site)
    {
        double best = std::numeric_limits<double>::infinity();
        for (const auto &s : positions.wrap_shifts)
            best = std::min(best, std::hypot(user.x - site.x - s.x, user.y - site.y - s.y));
        return best;
    }

    LargeScaleMap compute_large_scale(const Positions &positions, const NetworkConfig &config, std::uint64_t seed)
    {
        LargeScaleMap m;
        m.n_users = static_cast<int>(positions.users.size());
        m.n_cells = static_cast<int>(positions.cells.size());
        m.alpha.assign(static_cast<std::size_t>(m.n_users) * m.n_cells, 0.0);
        m.background.assign(m.n_users, 0.0);
        m.strongest_background.assign(m.n_users, 0.0);

        int n_sites = 0;
        for (int s : positions.site_of_cell)
            n_sites = std::max(n_sites, s + 1);
        const int n_bg = static_cast<int>(positions.background_sites.size());

        auto pathgain = [&](double d) {
            d = std::max(d, config.min_distance);
            const double pl_db = config.pathloss_ref_db + 10.0 * config.pathloss_exponent * std::log10(d / 1000.0);
            return db_to_linear(-pl_db);
        };

        for (int q = 0; q < m.n_users; ++q)
        {
            const int draw = positions.shadow_draw.empty() ? 0 : positions.shadow_draw[q];
            Engine rng = draw == 0 ? make_engine(seed, Stream::shadowing, {static_cast<std::uint64_t>(q)})
                                   : make_engine(seed, Stream::shadowing, {static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(draw)});
            std::normal_distribution<double> shadow(0.0, config.shadowing_db);
            std::vector<double> site_shadow(n_sites + n_bg);
            for (auto &s : site_shadow)
                s = config.shadowing_db > 0.0 ? shadow(rng) : 0.0;

            const Point u = positions.users[q];
            for (int i = 0; i < m.n_cells; ++i)
            {
                const Point c = positions.cells[i];
                double g_db = site_shadow[positions.site_of_cell[i]];
                if (config.sector_pattern)
                    g_db += sector_gain_db(positions.boresight_deg[i], c, u);
                m(q, i) = pathgain(link_distance(positions, u, c)) * db_to_linear(g_db);
            }
            double bg = 0.0;
            for (int b = 0; b < n_bg; ++b)
            {
                const double g = pathgain(link_distance(positions, u, positions.background_sites[b])) * db_to_linear(site_shadow[n_sites + b]);
                bg += g;
                m.strongest_background[q] = std::max(m.strongest_background[q], g);
            }
            m.background[q] = bg * config.tx_power * config.background_load;
        }
        return m;
    }

    Deployment build_layout(const NetworkConfig &config, std::uint64_t seed)
    {
        config.validate();
        Deployment dep;
        Positions &pos = dep.positions;
        pos.wrap_shifts.push_back({0.0, 0.0});
        const double isd = config.inter_site_distance;
        Engine rng = make_engine(seed, Stream::layout);
        const double nan = std::numeric_limits<double>::quiet_NaN();

        switch (config.layout_kind)
        {
        case LayoutKind::hex_grid:
        {
            const auto sites = hex_sites(isd, 2);
            for (int s = 0; s < 19; ++s)
                for (int k = 0; k < config.sectors_per_site; ++k)
                {
                    pos.cells.push_back(sites[s]);
                    pos.site_of_cell.push_back(s);
                    // boresights toward the flat sides of the hexagon
                    pos.boresight_deg.push_back(config.sectors_per_site == 1 ? nan : 120.0 * k);
                }
            if (config.wraparound)
                for (int k = 0; k < 6; ++k)
                    pos.wrap_shifts.push_back(rotate({4.0 * isd, kSqrt3 * isd}, 60.0 * k));
            const int per_site = config.users_per_cell * config.sectors_per_site;
            for (int s = 0; s < 19; ++s)
                for (int u = 0; u < per_site; ++u)
                    pos.users.push_back(drop_in_hexagon(rng, sites[s], isd, config.min_distance));
            break;
        }
        case LayoutKind::ring:
        {
            const int n = config.n_cells;
            if (n <= 3)
            {
                const Point lattice[3] = {{0.0, 0.0}, {isd, 0.0}, {0.5 * isd, 0.5 * kSqrt3 * isd}};
                for (int i = 0; i < n; ++i)
                    pos.cells.push_back(lattice[i]);
            }
            else
            {
                const double r = isd / (2.0 * std::sin(std::numbers::pi / n));
                for (int i = 0; i < n; ++i)
                {
                    const double a = 2.0 * std::numbers::pi * i / n;
                    pos.cells.push_back({r * std::cos(a), r * std::sin(a)});
                }
            }
            for (int i = 0; i < n; ++i)
            {
                pos.site_of_cell.push_back(i);
                pos.boresight_deg.push_back(nan);
            }
            if (config.background_ring)
            {
                Point centroid{0.0, 0.0};
                for (const auto &c : pos.cells)
                    centroid.x += c.x / n, centroid.y += c.y / n;
                for (const auto &p : hex_sites(isd, 4))
                {
                    if (std::hypot(p.x - centroid.x, p.y - centroid.y) > 2.0 * isd + 1e-6)
                        continue;
                    bool is_cell = false;
                    for (const auto &c : pos.cells)
                        is_cell |= std::hypot(p.x - c.x, p.y - c.y) < 0.5 * isd;
                    if (!is_cell)
                        pos.background_sites.push_back(p);
                }
            }
            for (int i = 0; i < n; ++i)
                for (int u = 0; u < config.users_per_cell; ++u)
                    pos.users.push_back(drop_in_hexagon(rng, pos.cells[i], isd, config.min_distance));
            break;
        }
        case LayoutKind::explicit_positions:
            pos.cells = config.cell_positions;
            for (int i = 0; i < config.n_cells; ++i)
            {
                pos.site_of_cell.push_back(i);
                pos.boresight_deg.push_back(nan);
            }
            pos.users = config.user_positions;
            break;
        }

        if (pos.users.empty())
            throw ConfigError("zero users dropped");

        dep.large_scale = compute_large_scale(pos, config, seed);
        if (config.layout_kind == LayoutKind::ring && config.background_ring && config.background_association &&
            !pos.background_sites.empty())
        {
            // users attached to a background site belong to another cluster; re-drop them in their nominal cell
            pos.shadow_draw.assign(pos.users.size(), 0);
            const int per_cell = config.users_per_cell;
            constexpr int kMaxDraws = 1000;
            for (int round = 0; round < kMaxDraws; ++round)
            {
                bool changed = false;
                const auto &m = dep.large_scale;
                for (int q = 0; q < m.n_users; ++q)
                {
                    double best = 0.0;
                    for (int i = 0; i < m.n_cells; ++i)
                        best = std::max(best, m(q, i));
                    if (m.strongest_background[q] <= best)
                        continue;
                    pos.users[q] = drop_in_hexagon(rng, pos.cells[q / per_cell], isd, config.min_distance);
                    ++pos.shadow_draw[q];
                    changed = true;
                }
                if (!changed)
                    break;
                if (round + 1 == kMaxDraws)
                    throw ConfigError("could not associate users with cluster cells");
                dep.large_scale = compute_large_scale(pos, config, seed);
            }
        }
        const auto &ls = dep.large_scale;
        dep.serving.resize(ls.n_users);
        dep.served.assign(ls.n_cells, {});
        for (int q = 0; q < ls.n_users; ++q)
        {
            int best = 0;
            for (int i = 1; i < ls.n_cells; ++i)
                if (ls(q, i) > ls(q, best))
                    best = i;
            dep.serving[q] = best;
            dep.served[best].push_back(q);
        }
        return dep;
    }

    CompSets derive_comp_sets(const LargeScaleMap &alpha, std::span<const int> serving, double delta_db)
    {
        const double delta = db_to_linear(delta_db);
        CompSets cs;
        cs.measurement_set.assign(alpha.n_users, {});
        cs.comp_users.assign(alpha.n_cells, {});
        cs.comp_requested.assign(alpha.n_cells, {});
        for (int q = 0; q < alpha.n_users; ++q)
        {
            const int s = serving[q];
            for (int j = 0; j < alpha.n_cells; ++j)
                if (j != s && alpha(q, s) / alpha(q, j) < delta)
                {
                    cs.measurement_set[q].push_back(j);
                    cs.comp_requested[j].push_back(q);
                }
            if (!cs.measurement_set[q].empty())
                cs.comp_users[s].push_back(q);
        }
        return cs;
    }

} // namespace rrsim::topology
