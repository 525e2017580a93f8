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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rrsim/phy.hpp"
#include "rrsim/simd/dispatch.hpp"

namespace rrsim::feedback
{
    enum class SamplingMode
    {
        exhaustive,  // full product codebook when affordable, Monte-Carlo otherwise
        monte_carlo
    };

    struct Sampling
    {
        SamplingMode mode = SamplingMode::exhaustive;
        int draws = 16;
        std::uint64_t seed = 0;
    };

    enum class ReportMode
    {
        baseline,           // interferer ranks unknown, no interference-rank recommendation
        rank_recommendation // joint (R*, I*) selection
    };

    enum class CqiDomain
    {
        sinr_db, // per-stream effective SINR in dB
        rate     // total rate in bits/s/Hz
    };

    struct FeedbackConfig
    {
        ReportMode mode = ReportMode::rank_recommendation;
        phy::ReceiverStrategy receiver = phy::ReceiverStrategy::mmse_irc_ideal;
        SamplingMode sampling = SamplingMode::exhaustive;
        int draws = 16;
        int max_exhaustive = 256; // product-codebook size above which Monte-Carlo is used
        int rank_min = 1;
        int rank_max = 4;
        int cqi_bits = 4;
        CqiDomain cqi_domain = CqiDomain::sinr_db;
        double cqi_lo = -10.0; // dB for sinr_db, bits/s/Hz for rate
        double cqi_hi = 20.0;
        bool delta_cqi = true;
        int delta_bits = 3;
        double delta_hi = 8.0;
        double backoff_db = 1.0;
        double rate_cap = 6.0;
        bool per_cell_iri = false;
        double tie_tolerance = 1e-12; // relative; scores closer than this are ties

        void validate(int n_tx) const;
    };

    // What a terminal measures: per channel block, its serving and interfering channels.
    struct TerminalView
    {
        int n_rx = 0;
        int n_tx = 0;
        std::vector<CMat> serving;                  // [block]
        std::vector<std::vector<CMat>> interferers; // [j][block], j over the CoMP measurement set
        double alpha_serving = 1.0;
        std::vector<double> alpha_interferers;
        double power = 1.0;
        double noise = 1.0; // sigma^2 plus interference from cells outside the measurement set
        std::vector<std::vector<std::pair<int, double>>> subbands; // [subband] -> (block, weight), weights sum to 1

        int n_blocks() const { return static_cast<int>(serving.size()); }
        int n_interferers() const { return static_cast<int>(interferers.size()); }
        int n_subbands() const { return static_cast<int>(subbands.size()); }
    };

    // Maps subcarriers to channel blocks for equally sized subbands.
    std::vector<std::vector<std::pair<int, double>>> subband_blocks(int n_subbands, int subcarriers_per_subband, int coherence);

    // Interferer precoder realizations. rank 0 in a profile means "unknown": drawn per draw.
    struct DrawSet
    {
        int n_draws = 0;
        std::vector<std::vector<int>> rank;  // [draw][j]
        std::vector<std::vector<int>> index; // [draw][j]
        bool exhaustive = false;
    };

    DrawSet make_draws(std::span<const int> profile, const phy::Codebook &codebook, int rank_min, int rank_max,
                       const Sampling &sampling, int max_exhaustive = 256);

    // Expected per-subband rates T~(F) for a fixed interferer-rank profile. Work that does not depend on F
    // (interference covariances, whitening) is done once per profile.
    class RateEvaluator
    {
    public:
        RateEvaluator(const TerminalView &view, const phy::Codebook &codebook, phy::ReceiverStrategy strategy,
                      double rate_cap, const simd::KernelTable &kernels = simd::active_kernels());

        void prepare(const DrawSet &draws);
        std::vector<double> subband_rates(const CMat &f);

    private:
        const CMat &interferer_product(int j, int blk, int rank, int index);
        void rates_ideal(const CMat &f, std::vector<double> &per_item);
        void rates_simplified(const CMat &f, std::vector<double> &per_item);

        const TerminalView &view_;
        const phy::Codebook &cb_;
        phy::ReceiverStrategy strategy_;
        double cap_;
        const simd::KernelTable &k_;
        DrawSet draws_;
        std::vector<CMat> prod_;     // sqrt(alpha E / r) H_j W, cached by (j, blk, rank, index)
        std::vector<char> prod_ok_;
        simd::CBatch x_, y_;         // ideal receiver: whitened serving channels and projections
        std::vector<double> floor_;  // per item
        std::vector<double> d_;
        std::vector<CMat> q_simpl_;  // simplified receiver: per-block filter covariance
        std::vector<int> key_of_;    // simplified receiver: [draw * J + j] -> distinct (rank, index) slot of j
        std::vector<std::vector<std::pair<int, int>>> keys_; // per interferer: distinct (rank, index)
    };

    // Average over interferer-precoder draws of the achievable rate, per subband.
    std::vector<double> expected_rate(const TerminalView &view, const CMat &f, std::span<const int> interferer_ranks,
                                      const phy::Codebook &codebook, phy::ReceiverStrategy strategy,
                                      const Sampling &sampling, double rate_cap = 6.0, int rank_min = 1, int rank_max = 4);

    struct FeedbackReport
    {
        int user = -1;
        bool rank_recommendation = false;
        int serving_ri = 0;             // R*
        int recommended_iri = 0;        // I* (0 when not reported)
        std::vector<int> per_cell_iri;  // one entry per cell of the measurement set
        std::vector<int> pmi;           // [subband]
        std::vector<int> cqi;           // [subband] levels
        std::vector<double> estimated;  // [subband] T~ at the optimum, unquantized
        int rank_min = 1;
        int n_profiles = 0;
        int best_profile = 0;
        std::vector<double> score;      // [(L - rank_min) * n_profiles + profile], subband-average of max_F T~
        std::vector<int> delta_cqi;     // same indexing, quantized loss score* - score >= 0
        std::vector<std::vector<int>> profiles;

        double best_score() const;
        // Index of the profile that applies interference rank i uniformly (common mode), or -1.
        int profile_of(int i) const;
    };

    int quantize_uniform(double value, int bits, double lo, double hi);
    double dequantize_uniform(int level, int bits, double lo, double hi);

    int quantize_cqi(double rate, int rank, const FeedbackConfig &cfg);
    // Rate the scheduler assumes for a CQI level at the given rank, after the backoff.
    double cqi_rate(int level, int rank, const FeedbackConfig &cfg, double offset_db = 0.0);

    // Dequantized throughput loss when serving at rank l while the measurement set uses rank i.
    double delta_loss(const FeedbackReport &r, int l, int i, const FeedbackConfig &cfg);

    // Joint rank/interference-rank selection with per-subband precoders and CQI.
    FeedbackReport select_ranks_and_precoders(const TerminalView &view, const phy::Codebook &codebook,
                                              const FeedbackConfig &cfg, std::uint64_t draw_seed,
                                              const simd::KernelTable &kernels = simd::active_kernels());

} // namespace rrsim::feedback
