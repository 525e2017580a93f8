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

#include "rrsim/channel.hpp"

#include <algorithm>
#include <cmath>

#include "rrsim/rng.hpp"

namespace rrsim::channel
{
    void MeasurementErrorModel::validate() const
    {
        for (std::size_t i = 0; i < mse_table.size(); ++i)
        {
            if (!(mse_table[i].second >= 0.0) || !std::isfinite(mse_table[i].second))
                throw ConfigError("mse_table variances must be finite and >= 0");
            if (i > 0 && !(mse_table[i].first > mse_table[i - 1].first))
                throw ConfigError("mse_table must be sorted by strictly increasing SINR");
        }
        if (mode == ErrorMode::additive && mse_table.empty())
            throw ConfigError("additive measurement error needs a non-empty mse_table");
    }

    double MeasurementErrorModel::variance_at(double sinr_db) const
    {
        if (mode == ErrorMode::ideal || mse_table.empty())
            return 0.0;
        if (sinr_db <= mse_table.front().first)
            return mse_table.front().second;
        if (sinr_db >= mse_table.back().first)
            return mse_table.back().second;
        auto it = std::upper_bound(mse_table.begin(), mse_table.end(), sinr_db,
                                   [](double v, const auto &e) { return v < e.first; });
        const auto &hi = *it;
        const auto &lo = *(it - 1);
        const double t = (sinr_db - lo.first) / (hi.first - lo.first);
        return lo.second + t * (hi.second - lo.second);
    }

    ChannelRealization::ChannelRealization(const ChannelDims &dims, const std::vector<char> &links)
        : dims_(dims)
    {
        if (dims.n_subcarriers < 1)
            throw ConfigError("n_subcarriers must be >= 1");
        if (dims.coherence < 1)
            throw ConfigError("coherence must be >= 1");
        if (links.size() != static_cast<std::size_t>(dims.n_users) * dims.n_cells)
            throw std::invalid_argument("link mask size mismatch");
        index_.assign(links.size(), -1);
        for (std::size_t i = 0; i < links.size(); ++i)
            if (links[i])
                index_[i] = n_links_++;
        data_.assign(static_cast<std::size_t>(n_links_) * dims.n_blocks() * dims.n_rx * dims.n_tx, cdouble(0.0, 0.0));
    }

    std::size_t ChannelRealization::offset(int user, int cell, int blk) const
    {
        const int li = link_index(user, cell);
        if (li < 0)
            throw std::out_of_range("channel link not modeled");
        return (static_cast<std::size_t>(li) * dims_.n_blocks() + blk) * dims_.n_rx * dims_.n_tx;
    }

    ChannelRealization::ConstMap ChannelRealization::block(int user, int cell, int blk) const
    {
        return ConstMap(data_.data() + offset(user, cell, blk), dims_.n_rx, dims_.n_tx);
    }

    ChannelRealization::Map ChannelRealization::block(int user, int cell, int blk)
    {
        return Map(data_.data() + offset(user, cell, blk), dims_.n_rx, dims_.n_tx);
    }

    double ar_coefficient(double doppler_hz, double subframe_s)
    {
        return std::cyl_bessel_j(0.0, 2.0 * 3.14159265358979323846 * doppler_hz * subframe_s);
    }

    Eigen::MatrixXcd exponential_correlation(int n, double rho)
    {
        Eigen::MatrixXcd r(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r(i, j) = std::pow(rho, std::abs(i - j));
        return r;
    }

    Eigen::MatrixXcd correlation_root(const Eigen::MatrixXcd &r)
    {
        if (r.rows() != r.cols())
            throw ConfigError("correlation matrix must be square");
        if ((r - r.adjoint()).norm() > 1e-9 * std::max(1.0, r.norm()))
            throw ConfigError("correlation matrix must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
        const auto &ev = es.eigenvalues();
        if (ev.minCoeff() < -1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff()))
            throw ConfigError("correlation matrix is not positive semidefinite");
        Eigen::VectorXd s = ev.cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
    }

    namespace
    {
        Eigen::MatrixXcd pick(const Eigen::MatrixXcd &m, int n, double rho)
        {
            if (m.size() == 0)
            {
                if (!(rho >= 0.0 && rho < 1.0))
                    throw ConfigError("correlation coefficient must be in [0, 1)");
                return exponential_correlation(n, rho);
            }
            if (m.rows() != n)
                throw ConfigError("correlation matrix size does not match the antenna count");
            return m;
        }
    } // namespace

    ChannelProcess::ChannelProcess(const ChannelDims &dims, const std::vector<char> &links, const CorrelationSpec &corr,
                                   double ar_coeff, std::uint64_t seed)
        : g_(dims, links), h_(dims, links), a_(ar_coeff), seed_(seed)
    {
        if (!(a_ >= 0.0 && a_ <= 1.0))
            throw ConfigError("AR coefficient must be in [0, 1]");
        rx_root_ = correlation_root(pick(corr.rx_matrix, dims.n_rx, corr.rx_rho));
        tx_root_t_ = correlation_root(pick(corr.tx_matrix, dims.n_tx, corr.tx_rho)).transpose();
        correlated_ = !rx_root_.isIdentity(0.0) || !tx_root_t_.isIdentity(0.0);

        const int nb = dims.n_blocks();
        for (int u = 0; u < dims.n_users; ++u)
            for (int c = 0; c < dims.n_cells; ++c)
            {
                if (!g_.has_link(u, c))
                    continue;
                for (int b = 0; b < nb; ++b)
                {
                    Engine rng = make_engine(seed_, Stream::channel, {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(b)});
                    auto g = g_.block(u, c, b);
                    for (int j = 0; j < dims.n_tx; ++j)
                        for (int i = 0; i < dims.n_rx; ++i)
                            g(i, j) = complex_normal(rng);
                }
            }
        colour();
    }

    void ChannelProcess::colour()
    {
        h_.subframe = g_.subframe;
        if (!correlated_)
        {
            std::copy(g_.raw().begin(), g_.raw().end(), h_.raw().begin());
            return;
        }
        const auto &d = g_.dims();
        for (int u = 0; u < d.n_users; ++u)
            for (int c = 0; c < d.n_cells; ++c)
                if (g_.has_link(u, c))
                    for (int b = 0; b < d.n_blocks(); ++b)
                        h_.block(u, c, b) = rx_root_ * g_.block(u, c, b) * tx_root_t_;
    }

    void ChannelProcess::advance()
    {
        ++g_.subframe;
        if (a_ < 1.0)
        {
            const double b = std::sqrt(1.0 - a_ * a_);
            const auto &d = g_.dims();
            for (int u = 0; u < d.n_users; ++u)
                for (int c = 0; c < d.n_cells; ++c)
                {
                    if (!g_.has_link(u, c))
                        continue;
                    Engine rng = make_engine(seed_, Stream::innovation, {static_cast<std::uint64_t>(g_.subframe), static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(c)});
                    for (int blk = 0; blk < d.n_blocks(); ++blk)
                    {
                        auto g = g_.block(u, c, blk);
                        for (int j = 0; j < d.n_tx; ++j)
                            for (int i = 0; i < d.n_rx; ++i)
                                g(i, j) = a_ * g(i, j) + b * complex_normal(rng);
                    }
                }
        }
        colour();
    }

    ChannelRealization sample_channel(const ChannelDims &dims, const std::vector<char> &links, const CorrelationSpec &corr,
                                      std::uint64_t seed)
    {
        return ChannelProcess(dims, links, corr, 1.0, seed).current();
    }

    ChannelRealization apply_measurement_error(const ChannelRealization &h_true, const MeasurementErrorModel &model,
                                               std::span<const double> wideband_sinr_db, std::uint64_t seed)
    {
        if (model.mode == ErrorMode::ideal)
            return h_true;
        ChannelRealization out = h_true;
        const auto &d = h_true.dims();
        for (int u = 0; u < d.n_users; ++u)
        {
            const double v = model.variance_at(wideband_sinr_db[u]);
            if (v <= 0.0)
                continue;
            Engine rng = make_engine(seed, Stream::measurement, {static_cast<std::uint64_t>(h_true.subframe), static_cast<std::uint64_t>(u)});
            for (int c = 0; c < d.n_cells; ++c)
            {
                if (!out.has_link(u, c))
                    continue;
                for (int b = 0; b < d.n_blocks(); ++b)
                {
                    auto h = out.block(u, c, b);
                    for (int j = 0; j < d.n_tx; ++j)
                        for (int i = 0; i < d.n_rx; ++i)
                            h(i, j) += complex_normal(rng, v);
                }
            }
        }
        return out;
    }

} // namespace rrsim::channel
