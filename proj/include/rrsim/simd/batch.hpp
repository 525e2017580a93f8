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

#include <vector>

#include "rrsim/common.hpp"

namespace rrsim::simd
{
    // Structure-of-arrays batch of small complex matrices: element (r, c) of item i lives at
    // re[(r * cols + c) * stride + i]. stride is padded to a multiple of 4 so vector kernels can run
    // over whole lanes; padding items are zero-initialised.
    // Plain view handed to the kernels. The vector kernels are compiled with different target flags,
    // so they only ever see raw pointers, never inline members shared with the rest of the library.
    struct BatchView
    {
        double *re;
        double *im;
        int rows, cols, stride;
    };

    class CBatch
    {
    public:
        static constexpr int kLanes = 4;

        CBatch() = default;
        CBatch(int rows, int cols, int n) { resize(rows, cols, n); }

        void resize(int rows, int cols, int n);

        int rows() const { return rows_; }
        int cols() const { return cols_; }
        int size() const { return n_; }
        int stride() const { return stride_; }

        double *re(int r, int c) { return re_.data() + static_cast<std::size_t>(r * cols_ + c) * stride_; }
        double *im(int r, int c) { return im_.data() + static_cast<std::size_t>(r * cols_ + c) * stride_; }
        const double *re(int r, int c) const { return re_.data() + static_cast<std::size_t>(r * cols_ + c) * stride_; }
        const double *im(int r, int c) const { return im_.data() + static_cast<std::size_t>(r * cols_ + c) * stride_; }

        cdouble get(int r, int c, int item) const { return {re(r, c)[item], im(r, c)[item]}; }
        void set(int r, int c, int item, cdouble v)
        {
            re(r, c)[item] = v.real();
            im(r, c)[item] = v.imag();
        }

        template <class M>
        void set_matrix(int item, const M &m)
        {
            for (int r = 0; r < rows_; ++r)
                for (int c = 0; c < cols_; ++c)
                    set(r, c, item, m(r, c));
        }
        CMat matrix(int item) const;

        BatchView view() { return {re_.data(), im_.data(), rows_, cols_, stride_}; }
        BatchView view() const { return {const_cast<double *>(re_.data()), const_cast<double *>(im_.data()), rows_, cols_, stride_}; }

    private:
        int rows_ = 0, cols_ = 0, n_ = 0, stride_ = 0;
        std::vector<double> re_, im_;
    };

} // namespace rrsim::simd
