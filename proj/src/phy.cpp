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

#include "rrsim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rrsim::phy
{
    double regularization_floor(double noise, double trace, int n_rx)
    {
        return std::max(noise, 1e-12 * trace / n_rx);
    }

    CMat interference_covariance(const LinkState &link, ReceiverStrategy strategy)
    {
        const int nr = static_cast<int>(link.H.rows());
        CMat q = CMat::Zero(nr, nr);
        for (const auto &in : link.interferers)
        {
            if (strategy == ReceiverStrategy::mmse_irc_ideal)
            {
                if (in.F.cols() == 0)
                    continue;
                const CMat hf = in.H * in.F;
                q.noalias() += (in.alpha * in.power / static_cast<double>(in.F.cols())) * hf * hf.adjoint();
            }
            else
                q.noalias() += (in.alpha * in.power / static_cast<double>(in.H.cols())) * in.H * in.H.adjoint();
        }
        const double tr = q.trace().real() + nr * link.noise;
        q.diagonal().array() += regularization_floor(link.noise, tr, nr);
        return q;
    }

    ReceiveFilter mmse_filter(const LinkState &link, ReceiverStrategy strategy, double ill_threshold)
    {
        const int L = link.rank();
        if (L < 1 || link.F.rows() != link.H.cols())
            throw std::invalid_argument("mmse_filter: precoder does not match the channel");
        const double s = link.alpha * link.power / L;
        const CMat hf = link.H * link.F;
        CMat r = interference_covariance(link, strategy);
        r.noalias() += s * hf * hf.adjoint();
        if (!(link.noise > 0.0))
        {
            // noiseless link: keep R invertible relative to its own scale
            const double nr = static_cast<double>(r.rows());
            r.diagonal().array() += 1e-12 * r.trace().real() / nr;
        }

        ReceiveFilter out;
        out.strategy = strategy;
        Eigen::SelfAdjointEigenSolver<CMat> es(r, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
        out.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
        out.ill_conditioned = !(out.condition <= ill_threshold);
        const CMat x = r.llt().solve(hf); // R^{-1} H F
        out.G = s * x.adjoint();
        return out;
    }

    std::vector<double> per_stream_sinr(const LinkState &link, const ReceiveFilter &filter)
    {
        const int L = link.rank();
        if (filter.G.rows() != L)
            throw std::invalid_argument("per_stream_sinr: filter rank mismatch");
        const double s = link.alpha * link.power / L;
        const CMat ghf = filter.G * (link.H * link.F);
        std::vector<double> leak(L, 0.0);
        for (const auto &in : link.interferers)
        {
            if (in.F.cols() == 0)
                continue;
            const CMat gi = filter.G * (in.H * in.F);
            const double p = in.alpha * in.power / static_cast<double>(in.F.cols());
            for (int m = 0; m < L; ++m)
                leak[m] += p * gi.row(m).squaredNorm();
        }
        std::vector<double> rho(L);
        for (int m = 0; m < L; ++m)
        {
            double intra = 0.0;
            for (int n = 0; n < L; ++n)
                if (n != m)
                    intra += std::norm(ghf(m, n));
            const double den = s * intra + leak[m] + link.noise * filter.G.row(m).squaredNorm();
            rho[m] = den > 0.0 ? s * std::norm(ghf(m, m)) / den : std::numeric_limits<double>::infinity();
        }
        return rho;
    }

    double achievable_rate(std::span<const double> rho, double cap)
    {
        double t = 0.0;
        for (double r : rho)
            t += std::min(std::log2(1.0 + std::max(r, 0.0)), cap);
        return t;
    }

    double link_rate(const LinkState &link, ReceiverStrategy strategy, double cap)
    {
        return achievable_rate(per_stream_sinr(link, mmse_filter(link, strategy)), cap);
    }

    std::vector<double> mmse_sinr_closed_form(const CMat &q, const CMat &h, const CMat &f, double s)
    {
        const int L = static_cast<int>(f.cols());
        Eigen::LLT<CMat> llt(q);
        const CMat y = llt.matrixL().solve(h * f);
        CMat a = CMat::Identity(L, L);
        a.noalias() += s * y.adjoint() * y;
        const CMat inv = a.llt().solve(CMat::Identity(L, L));
        std::vector<double> rho(L);
        for (int m = 0; m < L; ++m)
            rho[m] = std::max(1.0 / inv(m, m).real() - 1.0, 0.0);
        return rho;
    }

} // namespace rrsim::phy
