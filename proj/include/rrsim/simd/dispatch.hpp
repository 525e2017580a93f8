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

#include <string>

#include "rrsim/simd/batch.hpp"

namespace rrsim::simd
{
    // Batched kernels for the closed-form MMSE rate. Every item of a batch is processed independently.
    struct KernelTable
    {
        const char *name;
        // x = C^{-1} h with q = C C^H (Cholesky, q Hermitian positive definite). q: n x n, h and x: n x m.
        void (*whiten)(BatchView q, BatchView h, BatchView x);
        // y = x f for a precoder f shared by all items; f is column-major with interleaved re/im.
        void (*project)(BatchView x, const double *f, int f_cols, BatchView y);
        // d[m * y.stride + i] = [(I + scale y_i^H y_i)^{-1}]_mm, m < y.cols.
        void (*mmse_diag)(BatchView y, double scale, double *d);
    };

    // Typed front-ends; outputs must already have the right shape.
    void whiten(const KernelTable &k, const CBatch &q, const CBatch &h, CBatch &x);
    void project(const KernelTable &k, const CBatch &x, const CMat &f, CBatch &y);
    void mmse_diag(const KernelTable &k, const CBatch &y, double scale, std::vector<double> &d);

    enum class Isa
    {
        scalar,
        avx2
    };

    const KernelTable &scalar_kernels();
    // nullptr when the library was built without AVX2 support.
    const KernelTable *avx2_kernels();
    bool avx2_supported();

    // Best available table; RRSIM_ISA=scalar in the environment forces the portable path.
    const KernelTable &active_kernels();
    const KernelTable &kernels_for(Isa isa);

} // namespace rrsim::simd
