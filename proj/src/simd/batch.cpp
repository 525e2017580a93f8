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

#include "rrsim/simd/batch.hpp"

#include <stdexcept>

#include "rrsim/simd/dispatch.hpp"

namespace rrsim::simd
{
    void CBatch::resize(int rows, int cols, int n)
    {
        rows_ = rows;
        cols_ = cols;
        n_ = n;
        stride_ = (n + kLanes - 1) / kLanes * kLanes;
        const std::size_t total = static_cast<std::size_t>(rows) * cols * stride_;
        re_.assign(total, 0.0);
        im_.assign(total, 0.0);
    }

    CMat CBatch::matrix(int item) const
    {
        CMat m(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                m(r, c) = get(r, c, item);
        return m;
    }

    void whiten(const KernelTable &k, const CBatch &q, const CBatch &h, CBatch &x)
    {
        if (q.rows() != q.cols() || h.rows() != q.rows() || x.rows() != h.rows() || x.cols() != h.cols() ||
            q.stride() != h.stride() || x.stride() != h.stride())
            throw std::invalid_argument("whiten: shape mismatch");
        k.whiten(q.view(), h.view(), x.view());
    }

    void project(const KernelTable &k, const CBatch &x, const CMat &f, CBatch &y)
    {
        if (f.rows() != x.cols() || y.rows() != x.rows() || y.cols() != f.cols() || y.stride() != x.stride())
            throw std::invalid_argument("project: shape mismatch");
        double buf[2 * kMaxAntennas * kMaxAntennas];
        for (int l = 0; l < f.cols(); ++l)
            for (int c = 0; c < f.rows(); ++c)
            {
                buf[2 * (l * f.rows() + c)] = f(c, l).real();
                buf[2 * (l * f.rows() + c) + 1] = f(c, l).imag();
            }
        k.project(x.view(), buf, static_cast<int>(f.cols()), y.view());
    }

    void mmse_diag(const KernelTable &k, const CBatch &y, double scale, std::vector<double> &d)
    {
        d.resize(static_cast<std::size_t>(y.cols()) * y.stride());
        k.mmse_diag(y.view(), scale, d.data());
    }

} // namespace rrsim::simd
