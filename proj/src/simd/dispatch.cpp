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

#include "rrsim/simd/dispatch.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace rrsim::simd
{
#if RRSIM_HAVE_AVX2
    const KernelTable *avx2_kernels_impl();
#endif

    const KernelTable *avx2_kernels()
    {
#if RRSIM_HAVE_AVX2
        return avx2_kernels_impl();
#else
        return nullptr;
#endif
    }

    bool avx2_supported()
    {
#if RRSIM_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }

    const KernelTable &kernels_for(Isa isa)
    {
        if (isa == Isa::scalar)
            return scalar_kernels();
        if (!avx2_supported())
            throw std::runtime_error("AVX2 kernels are not available on this build or CPU");
        return *avx2_kernels();
    }

    const KernelTable &active_kernels()
    {
        static const KernelTable &t = []() -> const KernelTable & {
            const char *env = std::getenv("RRSIM_ISA");
            if (env && std::string_view(env) == "scalar")
                return scalar_kernels();
            return avx2_supported() ? *avx2_kernels() : scalar_kernels();
        }();
        return t;
    }

} // namespace rrsim::simd
