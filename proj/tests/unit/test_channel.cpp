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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rrsim/channel.hpp"

using namespace rrsim;
using namespace rrsim::channel;

namespace
{
    ChannelDims dims(int users, int n, int subcarriers, int coherence)
    {
        ChannelDims d;
        d.n_users = users;
        d.n_cells = 1;
        d.n_rx = n;
        d.n_tx = n;
        d.n_subcarriers = subcarriers;
        d.coherence = coherence;
        return d;
    }

    // E[H H^H] estimated over users and blocks.
    Eigen::MatrixXcd row_covariance(const ChannelRealization &h)
    {
        const auto &d = h.dims();
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d.n_rx, d.n_rx);
        int n = 0;
        for (int u = 0; u < d.n_users; ++u)
            for (int b = 0; b < d.n_blocks(); ++b, ++n)
            {
                const Eigen::MatrixXcd m = h.block(u, 0, b);
                acc += m * m.adjoint();
            }
        return acc / n;
    }
} // namespace

TEST_CASE("uncorrelated entries have unit variance and no cross-correlation", "[channel]")
{
    const auto d = dims(10000, 2, 1, 1);
    const auto h = sample_channel(d, std::vector<char>(d.n_users, 1), {}, 11);
    // covariance of vec(H) over 10^4 draws
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(4, 4);
    for (int u = 0; u < d.n_users; ++u)
    {
        const Eigen::MatrixXcd m = h.block(u, 0, 0);
        Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.data(), 4);
        c += v * v.adjoint() / static_cast<double>(d.n_users);
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(c(i, j) - (i == j ? 1.0 : 0.0)) < 0.05);
}

TEST_CASE("Kronecker correlation shapes the receive covariance", "[channel]")
{
    const auto d = dims(4000, 4, 4, 1);
    CorrelationSpec corr;
    corr.rx_rho = 0.7;
    corr.tx_rho = 0.3;
    const auto h = sample_channel(d, std::vector<char>(d.n_users, 1), corr, 5);
    // E[H H^H] = tr(R_tx) R_rx
    const Eigen::MatrixXcd expect = 4.0 * exponential_correlation(4, 0.7);
    const Eigen::MatrixXcd got = row_covariance(h);
    CHECK((got - expect).norm() / expect.norm() < 0.05);
}

TEST_CASE("explicit correlation matrices must be Hermitian positive semidefinite", "[channel]")
{
    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0; // eigenvalue -1
    CHECK_THROWS_AS(correlation_root(bad), ConfigError);
    Eigen::MatrixXcd asym(2, 2);
    asym << 1.0, 0.5, 0.1, 1.0;
    CHECK_THROWS_AS(correlation_root(asym), ConfigError);
    const Eigen::MatrixXcd r = exponential_correlation(3, 0.5);
    const Eigen::MatrixXcd s = correlation_root(r);
    CHECK((s * s - r).norm() < 1e-12);
}

TEST_CASE("one coherence block spans every subcarrier", "[channel]")
{
    const auto d = dims(3, 2, 12, 12);
    REQUIRE(d.n_blocks() == 1);
    const auto h = sample_channel(d, std::vector<char>(d.n_users, 1), {}, 3);
    for (int s = 1; s < 12; ++s)
        CHECK(Eigen::MatrixXcd(h.at_subcarrier(1, 0, s)) == Eigen::MatrixXcd(h.at_subcarrier(1, 0, 0)));
    const auto d2 = dims(1, 2, 12, 4);
    CHECK(d2.n_blocks() == 3);
}

TEST_CASE("unit AR coefficient freezes the channel", "[channel]")
{
    const auto d = dims(4, 2, 8, 2);
    ChannelProcess p(d, std::vector<char>(d.n_users, 1), {}, 1.0, 9);
    const std::vector<cdouble> first(p.current().raw().begin(), p.current().raw().end());
    for (int t = 0; t < 5; ++t)
        p.advance();
    const auto now = p.current().raw();
    CHECK(std::equal(first.begin(), first.end(), now.begin()));
    CHECK(p.current().subframe == 5);
}

TEST_CASE("AR(1) evolution keeps unit power and lag-one correlation a", "[channel]")
{
    const double a = 0.8;
    const auto d = dims(2000, 2, 1, 1);
    ChannelProcess p(d, std::vector<char>(d.n_users, 1), {}, a, 4);
    const std::vector<cdouble> before(p.current().raw().begin(), p.current().raw().end());
    p.advance();
    const auto after = p.current().raw();
    cdouble cross = 0.0;
    double power = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
    {
        cross += after[i] * std::conj(before[i]);
        power += std::norm(after[i]);
    }
    CHECK(power / before.size() == Catch::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(cross / static_cast<double>(before.size()) - a) < 0.05);
    CHECK(ar_coefficient(5.56) == Catch::Approx(std::cyl_bessel_j(0.0, 2.0 * M_PI * 5.56e-3)));
    CHECK(ar_coefficient(0.0) == 1.0);
}

TEST_CASE("links are independent of which other links are stored", "[channel]")
{
    ChannelDims d = dims(3, 2, 4, 1);
    d.n_cells = 2;
    const auto all = sample_channel(d, std::vector<char>(6, 1), {}, 21);
    std::vector<char> some(6, 0);
    some[1 * 2 + 1] = 1;
    const auto one = sample_channel(d, some, {}, 21);
    for (int b = 0; b < d.n_blocks(); ++b)
        CHECK(Eigen::MatrixXcd(all.block(1, 1, b)) == Eigen::MatrixXcd(one.block(1, 1, b)));
    CHECK_FALSE(one.has_link(0, 0));
}

TEST_CASE("ideal measurement returns the true channel bit for bit", "[channel]")
{
    const auto d = dims(5, 2, 4, 1);
    const auto h = sample_channel(d, std::vector<char>(d.n_users, 1), {}, 8);
    MeasurementErrorModel m;
    const std::vector<double> sinr(5, 0.0);
    const auto out = apply_measurement_error(h, m, sinr, 1);
    CHECK(std::equal(h.raw().begin(), h.raw().end(), out.raw().begin()));
}

TEST_CASE("zero variance table entries leave the channel untouched", "[channel]")
{
    const auto d = dims(2, 2, 4, 1);
    const auto h = sample_channel(d, std::vector<char>(d.n_users, 1), {}, 8);
    MeasurementErrorModel m;
    m.mode = ErrorMode::additive;
    m.mse_table = {{0.0, 0.0}, {10.0, 0.2}};
    const std::vector<double> sinr{-5.0, 10.0};
    const auto out = apply_measurement_error(h, m, sinr, 1);
    for (int b = 0; b < d.n_blocks(); ++b)
    {
        CHECK(Eigen::MatrixXcd(out.block(0, 0, b)) == Eigen::MatrixXcd(h.block(0, 0, b)));
        CHECK(Eigen::MatrixXcd(out.block(1, 0, b)) != Eigen::MatrixXcd(h.block(1, 0, b)));
    }
    CHECK(m.variance_at(5.0) == Catch::Approx(0.1));
    CHECK(m.variance_at(50.0) == 0.2);
}

TEST_CASE("additive measurement error has the tabulated variance", "[channel]")
{
    const auto d = dims(1, 2, 2500, 1); // 10^4 entries
    const auto h = sample_channel(d, std::vector<char>(1, 1), {}, 8);
    MeasurementErrorModel m;
    m.mode = ErrorMode::additive;
    m.mse_table = {{0.0, 0.1}};
    const std::vector<double> sinr{3.0};
    const auto out = apply_measurement_error(h, m, sinr, 77);
    double var = 0.0;
    for (std::size_t i = 0; i < h.raw().size(); ++i)
        var += std::norm(out.raw()[i] - h.raw()[i]);
    var /= static_cast<double>(h.raw().size());
    CHECK(var == Catch::Approx(0.1).epsilon(0.05));
}

TEST_CASE("error tables are validated", "[channel]")
{
    MeasurementErrorModel m;
    m.mode = ErrorMode::additive;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.mse_table = {{5.0, 0.1}, {1.0, 0.2}};
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.mse_table = {{1.0, -0.1}};
    CHECK_THROWS_AS(m.validate(), ConfigError);
}
