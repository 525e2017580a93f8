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
#include <utility>
#include <vector>

#include "rrsim/common.hpp"

namespace rrsim::channel
{
    // Spatial correlation. Either exponential (rho^|i-j|) or explicit Hermitian matrices.
    struct CorrelationSpec
    {
        double tx_rho = 0.0;
        double rx_rho = 0.0;
        Eigen::MatrixXcd tx_matrix; // optional, overrides tx_rho when non-empty
        Eigen::MatrixXcd rx_matrix; // optional, overrides rx_rho when non-empty
    };

    enum class ErrorMode
    {
        ideal,
        additive
    };

    struct MeasurementErrorModel
    {
        ErrorMode mode = ErrorMode::ideal;
        std::vector<std::pair<double, double>> mse_table; // (wideband SINR dB, error variance), sorted by SINR

        void validate() const;
        // Linear interpolation, clamped at the table ends. Zero for ideal mode or an empty table.
        double variance_at(double sinr_db) const;
    };

    struct ChannelDims
    {
        int n_users = 0;
        int n_cells = 0;
        int n_rx = 0;
        int n_tx = 0;
        int n_subcarriers = 0;
        int coherence = 1; // subcarriers per independent block
        int n_blocks() const { return (n_subcarriers + coherence - 1) / coherence; }
    };

    // Small-scale channels H_{k,q,j} for the modeled (user, cell) links. Blocks of `coherence`
    // subcarriers share one matrix, so storage is per block.
    class ChannelRealization
    {
    public:
        using ConstMap = Eigen::Map<const Eigen::MatrixXcd>;
        using Map = Eigen::Map<Eigen::MatrixXcd>;

        ChannelRealization() = default;
        // links[u * n_cells + c] says whether (u, c) is stored.
        ChannelRealization(const ChannelDims &dims, const std::vector<char> &links);

        const ChannelDims &dims() const { return dims_; }
        bool has_link(int user, int cell) const { return link_index(user, cell) >= 0; }
        int link_index(int user, int cell) const { return index_[static_cast<std::size_t>(user) * dims_.n_cells + cell]; }
        int n_links() const { return n_links_; }
        int block_of(int subcarrier) const { return subcarrier / dims_.coherence; }

        ConstMap block(int user, int cell, int blk) const;
        Map block(int user, int cell, int blk);
        ConstMap at_subcarrier(int user, int cell, int subcarrier) const { return block(user, cell, block_of(subcarrier)); }

        std::span<const cdouble> raw() const { return data_; }
        std::span<cdouble> raw() { return data_; }

        int subframe = 0;

    private:
        std::size_t offset(int user, int cell, int blk) const;

        ChannelDims dims_;
        std::vector<int> index_;
        int n_links_ = 0;
        std::vector<cdouble> data_;
    };

    // AR(1) factor of a Jakes process over one subframe.
    double ar_coefficient(double doppler_hz, double subframe_s = 1.0e-3);

    // Hermitian square root of a correlation matrix; throws ConfigError when not PSD.
    Eigen::MatrixXcd correlation_root(const Eigen::MatrixXcd &r);
    Eigen::MatrixXcd exponential_correlation(int n, double rho);

    // Time-evolving channel of one drop. The white state G evolves as G <- a G + sqrt(1-a^2) W and
    // H = R_rx^{1/2} G R_tx^{T/2}. Randomness is keyed by (seed, link, block) and (seed, subframe, link),
    // so the stored links do not influence each other's numbers.
    class ChannelProcess
    {
    public:
        ChannelProcess(const ChannelDims &dims, const std::vector<char> &links, const CorrelationSpec &corr,
                       double ar_coeff, std::uint64_t seed);

        const ChannelRealization &current() const { return h_; }
        void advance(); // moves to the next subframe

    private:
        void colour();

        ChannelRealization g_, h_;
        Eigen::MatrixXcd rx_root_, tx_root_t_;
        bool correlated_ = false;
        double a_;
        std::uint64_t seed_;
    };

    // Single realization (subframe 0) of the process above.
    ChannelRealization sample_channel(const ChannelDims &dims, const std::vector<char> &links, const CorrelationSpec &corr,
                                      std::uint64_t seed);

    // H_meas = H_true + E, E ~ CN(0, v_u) per entry with v_u from the table at the user's wideband SINR.
    ChannelRealization apply_measurement_error(const ChannelRealization &h_true, const MeasurementErrorModel &model,
                                               std::span<const double> wideband_sinr_db, std::uint64_t seed);

} // namespace rrsim::channel
