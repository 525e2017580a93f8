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

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"
#include "rrsim/simd/dispatch.hpp"

namespace rrsim::simd
{
    namespace
    {
        struct ScalarOps
        {
            using reg = double;
            static constexpr int width = 1;
            static double load(const double *p) { return *p; }
            static void store(double *p, double v) { *p = v; }
            static double set1(double v) { return v; }
            static double mul(double a, double b) { return a * b; }
            static double div(double a, double b) { return a / b; }
            static double fmadd(double a, double b, double c) { return a * b + c; }
            static double fnmadd(double a, double b, double c) { return c - a * b; }
            static double max(double a, double b) { return std::max(a, b); }
            static double sqrt(double a) { return std::sqrt(a); }
        };
        using Impl = detail::KernelImpl<ScalarOps>;
    } // namespace

    const KernelTable &scalar_kernels()
    {
        static const KernelTable t{"scalar", &Impl::whiten, &Impl::project, &Impl::mmse_diag};
        return t;
    }

} // namespace rrsim::simd
