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

// Lane-generic kernel bodies. Ops supplies the register type and arithmetic; the scalar
// translation unit instantiates them with plain doubles and the AVX2 unit with __m256d.

#pragma once

#include <cstddef>

#include "rrsim/simd/batch.hpp"

namespace rrsim::simd::detail
{
    template <class Ops>
    struct KernelImpl
    {
        using R = typename Ops::reg;
        static constexpr int W = Ops::width;
        static constexpr int N = kMaxAntennas;

        struct C
        {
            R re, im;
        };

        static std::size_t at(const BatchView &b, int r, int c, int i)
        {
            return static_cast<std::size_t>(r * b.cols + c) * b.stride + i;
        }
        static C load(const BatchView &b, int r, int c, int i) { return {Ops::load(b.re + at(b, r, c, i)), Ops::load(b.im + at(b, r, c, i))}; }
        static void store(const BatchView &b, int r, int c, int i, C v)
        {
            Ops::store(b.re + at(b, r, c, i), v.re);
            Ops::store(b.im + at(b, r, c, i), v.im);
        }

        // acc - a * conj(b)
        static C sub_mul_conj(C acc, C a, C b)
        {
            return {Ops::fnmadd(a.im, b.im, Ops::fnmadd(a.re, b.re, acc.re)),
                    Ops::fmadd(a.re, b.im, Ops::fnmadd(a.im, b.re, acc.im))};
        }
        // acc - a * b
        static C sub_mul(C acc, C a, C b)
        {
            return {Ops::fmadd(a.im, b.im, Ops::fnmadd(a.re, b.re, acc.re)),
                    Ops::fnmadd(a.re, b.im, Ops::fnmadd(a.im, b.re, acc.im))};
        }
        // acc + conj(a) * b
        static C add_conj_mul(C acc, C a, C b)
        {
            return {Ops::fmadd(a.im, b.im, Ops::fmadd(a.re, b.re, acc.re)),
                    Ops::fnmadd(a.im, b.re, Ops::fmadd(a.re, b.im, acc.im))};
        }
        static C scale(C a, R s) { return {Ops::mul(a.re, s), Ops::mul(a.im, s)}; }

        // In-place lower Cholesky of a (lower triangle used); returns 1/diag in inv.
        static void cholesky(C (&a)[N][N], R (&inv)[N], int n)
        {
            const R tiny = Ops::set1(1e-300);
            const R one = Ops::set1(1.0);
            for (int j = 0; j < n; ++j)
            {
                R d = a[j][j].re;
                for (int k = 0; k < j; ++k)
                    d = Ops::fnmadd(a[j][k].im, a[j][k].im, Ops::fnmadd(a[j][k].re, a[j][k].re, d));
                d = Ops::max(d, tiny);
                const R l = Ops::sqrt(d);
                inv[j] = Ops::div(one, l);
                a[j][j] = {l, Ops::set1(0.0)};
                for (int i = j + 1; i < n; ++i)
                {
                    C t = a[i][j];
                    for (int k = 0; k < j; ++k)
                        t = sub_mul_conj(t, a[i][k], a[j][k]);
                    a[i][j] = scale(t, inv[j]);
                }
            }
        }

        static void whiten(BatchView q, BatchView h, BatchView x)
        {
            const int n = q.rows, m = h.cols;
            for (int i = 0; i < q.stride; i += W)
            {
                C a[N][N];
                R inv[N];
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c <= r; ++c)
                        a[r][c] = load(q, r, c, i);
                cholesky(a, inv, n);
                for (int col = 0; col < m; ++col)
                {
                    C xs[N];
                    for (int r = 0; r < n; ++r)
                    {
                        C t = load(h, r, col, i);
                        for (int k = 0; k < r; ++k)
                            t = sub_mul(t, a[r][k], xs[k]);
                        xs[r] = scale(t, inv[r]);
                        store(x, r, col, i, xs[r]);
                    }
                }
            }
        }

        static void project(BatchView x, const double *f, int L, BatchView y)
        {
            const int n = x.rows, m = x.cols;
            for (int i = 0; i < x.stride; i += W)
                for (int r = 0; r < n; ++r)
                {
                    C xr[N];
                    for (int c = 0; c < m; ++c)
                        xr[c] = load(x, r, c, i);
                    for (int l = 0; l < L; ++l)
                    {
                        R re = Ops::set1(0.0), im = Ops::set1(0.0);
                        for (int c = 0; c < m; ++c)
                        {
                            const R fr = Ops::set1(f[2 * (l * m + c)]), fi = Ops::set1(f[2 * (l * m + c) + 1]);
                            re = Ops::fnmadd(xr[c].im, fi, Ops::fmadd(xr[c].re, fr, re));
                            im = Ops::fmadd(xr[c].im, fr, Ops::fmadd(xr[c].re, fi, im));
                        }
                        store(y, r, l, i, {re, im});
                    }
                }
        }

        static void mmse_diag(BatchView y, double scale_, double *d)
        {
            const int n = y.rows, L = y.cols;
            const R s = Ops::set1(scale_);
            const R one = Ops::set1(1.0);
            for (int i = 0; i < y.stride; i += W)
            {
                C ys[N][N];
                for (int r = 0; r < n; ++r)
                    for (int l = 0; l < L; ++l)
                        ys[r][l] = load(y, r, l, i);
                C a[N][N];
                R inv[N];
                for (int p = 0; p < L; ++p)
                    for (int q = 0; q <= p; ++q)
                    {
                        C g{Ops::set1(0.0), Ops::set1(0.0)};
                        for (int r = 0; r < n; ++r)
                            g = add_conj_mul(g, ys[r][p], ys[r][q]);
                        a[p][q] = {Ops::fmadd(s, g.re, p == q ? one : Ops::set1(0.0)), Ops::mul(s, g.im)};
                    }
                cholesky(a, inv, L);
                // Column m of L^{-1}; diag(A^{-1})_m is its squared norm.
                for (int m = 0; m < L; ++m)
                {
                    C li[N];
                    li[m] = {inv[m], Ops::set1(0.0)};
                    R acc = Ops::mul(inv[m], inv[m]);
                    for (int k = m + 1; k < L; ++k)
                    {
                        C t{Ops::set1(0.0), Ops::set1(0.0)};
                        for (int p = m; p < k; ++p)
                            t = sub_mul(t, a[k][p], li[p]);
                        li[k] = scale(t, inv[k]);
                        acc = Ops::fmadd(li[k].im, li[k].im, Ops::fmadd(li[k].re, li[k].re, acc));
                    }
                    Ops::store(d + static_cast<std::size_t>(m) * y.stride + i, acc);
                }
            }
        }
    };

} // namespace rrsim::simd::detail
