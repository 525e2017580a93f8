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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rrsim
{
    using cdouble = std::complex<double>;

    // Upper bound on N_t and N_r. Matrices up to this size live on the stack.
    inline constexpr int kMaxAntennas = 8;

    using CMat = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxAntennas, kMaxAntennas>;
    using CVec = Eigen::Matrix<cdouble, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAntennas, 1>;

    // Raised for invalid configuration values; the CLI reports these with a nonzero exit code.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace rrsim
