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
#include <span>
#include <vector>

#include "rrsim/common.hpp"

namespace rrsim::topology
{
    enum class LayoutKind
    {
        hex_grid,          // 19 sites (two tiers), optional 3 sectors per site and wrap-around
        ring,              // n_cells omni sites spaced one ISD apart on a circle, plus a background ring
        explicit_positions // cell and user positions taken from the config
    };

    struct Point
    {
        double x = 0.0, y = 0.0;
    };

    struct NetworkConfig
    {
        int n_cells = 3;
        int cluster_size = 3;
        int users_per_cell = 10;
        double inter_site_distance = 500.0; // meters
        LayoutKind layout_kind = LayoutKind::ring;
        bool wraparound = false;
        int sectors_per_site = 1; // hex_grid only: 1 or 3
        double delta_db = 10.0;   // CoMP trigger threshold
        int rank_min = 1;
        int rank_max = 4;
        int n_tx = 4;
        int n_rx = 4;
        double tx_power = 1.0;               // E_s, linear, per cell
        double noise_power = 7.9432823472428154e-15; // sigma^2: -95 dBm against a 46 dBm E_s
        double pathloss_ref_db = 128.1;      // loss at 1 km
        double pathloss_exponent = 3.76;
        double shadowing_db = 8.0;
        double min_distance = 35.0;
        bool sector_pattern = false;         // parabolic 70 deg / 20 dB pattern instead of omni
        bool background_ring = true;         // ring layout: surrounding sites as white interference
        double background_load = 1.0;        // fraction of E_s radiated by background sites
        bool background_association = true;  // ring layout: re-drop users whose strongest site is a background site
        std::vector<Point> cell_positions;   // explicit_positions only
        std::vector<Point> user_positions;   // explicit_positions only

        // Throws ConfigError on violated invariants.
        void validate() const;
        int n_clusters() const { return n_cells / cluster_size; }
        int cluster_of(int cell) const { return cell / cluster_size; }
        double delta_linear() const { return db_to_linear(delta_db); }
    };

    // Large-scale gains alpha_{q,i} (path loss x shadowing x antenna gain), independent of subcarrier.
    struct LargeScaleMap
    {
        int n_users = 0;
        int n_cells = 0;
        std::vector<double> alpha;      // [user * n_cells + cell]
        std::vector<double> background; // per user: received background-ring power (linear, absolute)
        std::vector<double> strongest_background; // per user: largest background site gain (linear, per unit power)

        double operator()(int user, int cell) const { return alpha[static_cast<std::size_t>(user) * n_cells + cell]; }
        double &operator()(int user, int cell) { return alpha[static_cast<std::size_t>(user) * n_cells + cell]; }
    };

    struct CompSets
    {
        std::vector<std::vector<int>> measurement_set; // M_q, ascending cell ids
        std::vector<std::vector<int>> comp_users;      // P_i
        std::vector<std::vector<int>> comp_requested;  // R_i (victims of cell i)

        bool is_comp_user(int user) const { return !measurement_set[user].empty(); }
        bool in_measurement_set(int user, int cell) const;
    };

    struct Positions
    {
        std::vector<Point> cells;
        std::vector<double> boresight_deg; // per cell; NaN for omnidirectional cells
        std::vector<int> site_of_cell;     // shadowing is shared by the sectors of a site
        std::vector<Point> users;
        std::vector<Point> background_sites;
        std::vector<Point> wrap_shifts; // translations tried for wrap-around distance, {0,0} first
        std::vector<int> shadow_draw;   // per user shadowing realization index; empty means all zero
    };

    struct Deployment
    {
        Positions positions;
        LargeScaleMap large_scale;
        std::vector<int> serving;              // per user
        std::vector<std::vector<int>> served;  // per cell, ascending user ids
    };

    // Cell layout, user drop and serving assignment (strongest alpha, ties to the lower cell id).
    Deployment build_layout(const NetworkConfig &config, std::uint64_t seed);

    // Path loss d^-gamma with a reference loss at 1 km, lognormal shadowing per (user, site), optional sector gain.
    LargeScaleMap compute_large_scale(const Positions &positions, const NetworkConfig &config, std::uint64_t seed);

    // j in M_q iff alpha_{q,serving} / alpha_{q,j} < delta (linear), j != serving.
    CompSets derive_comp_sets(const LargeScaleMap &alpha, std::span<const int> serving, double delta_db);

    // Distance including wrap-around images when enabled.
    double link_distance(const Positions &positions, Point user, Point site);

} // namespace rrsim::topology
