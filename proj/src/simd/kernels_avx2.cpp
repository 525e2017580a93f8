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

#include <immintrin.h>

#include "kernels_impl.hpp"
#include "rrsim/simd/dispatch.hpp"

namespace rrsim::simd
{
    namespace
    {
        struct Avx2Ops
        {
            using reg = __m256d;
            static constexpr int width = 4;
            static __m256d load(const double *p) { return _mm256_loadu_pd(p); }
            static void store(double *p, __m256d v) { _mm256_storeu_pd(p, v); }
            static __m256d set1(double v) { return _mm256_set1_pd(v); }
            static __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }
            static __m256d div(__m256d a, __m256d b) { return _mm256_div_pd(a, b); }
            static __m256d fmadd(__m256d a, __m256d b, __m256d c) { return _mm256_fmadd_pd(a, b, c); }
            static __m256d fnmadd(__m256d a, __m256d b, __m256d c) { return _mm256_fnmadd_pd(a, b, c); }
            static __m256d max(__m256d a, __m256d b) { return _mm256_max_pd(a, b); }
            static __m256d sqrt(__m256d a) { return _mm256_sqrt_pd(a); }
        };
        using Impl = detail::KernelImpl<Avx2Ops>;
    } // namespace

    const KernelTable *avx2_kernels_impl()
    {
        static const KernelTable t{"avx2", &Impl::whiten, &Impl::project, &Impl::mmse_diag};
        return &t;
    }

} // namespace rrsim::simd
