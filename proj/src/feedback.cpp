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

#include "rrsim/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "rrsim/rng.hpp"

namespace rrsim::feedback
{
    void FeedbackConfig::validate(int n_tx) const
    {
        if (rank_min < 1 || rank_min > rank_max || rank_max > n_tx)
            throw ConfigError("feedback rank bounds must satisfy 1 <= rank_min <= rank_max <= n_tx");
        if (draws < 1)
            throw ConfigError("feedback.draws must be >= 1");
        if (cqi_bits < 1 || cqi_bits > 16 || delta_bits < 1 || delta_bits > 16)
            throw ConfigError("quantizer bit widths must be in [1, 16]");
        if (!(cqi_hi > cqi_lo))
            throw ConfigError("CQI range must satisfy lo < hi");
        if (!(delta_hi > 0.0))
            throw ConfigError("delta-CQI range must be positive");
        if (!(rate_cap > 0.0) || !(backoff_db >= 0.0))
            throw ConfigError("rate_cap must be > 0 and backoff_db >= 0");
        if (!(tie_tolerance >= 0.0))
            throw ConfigError("tie_tolerance must be >= 0");
    }

    std::vector<std::vector<std::pair<int, double>>> subband_blocks(int n_subbands, int subcarriers_per_subband, int coherence)
    {
        std::vector<std::vector<std::pair<int, double>>> out(n_subbands);
        for (int k = 0; k < n_subbands; ++k)
        {
            const int first = k * subcarriers_per_subband, last = first + subcarriers_per_subband;
            for (int s = first; s < last; ++s)
            {
                const int b = s / coherence;
                if (out[k].empty() || out[k].back().first != b)
                    out[k].push_back({b, 0.0});
                out[k].back().second += 1.0 / subcarriers_per_subband;
            }
        }
        return out;
    }

    DrawSet make_draws(std::span<const int> profile, const phy::Codebook &codebook, int rank_min, int rank_max,
                       const Sampling &sampling, int max_exhaustive)
    {
        const int J = static_cast<int>(profile.size());
        DrawSet ds;
        if (J == 0)
        {
            ds.n_draws = 1;
            ds.rank.assign(1, {});
            ds.index.assign(1, {});
            ds.exhaustive = true;
            return ds;
        }
        for (int r : profile)
            if (r > 0 && codebook.size(r) < 1)
                throw std::invalid_argument("empty codebook");

        bool known = std::all_of(profile.begin(), profile.end(), [](int r) { return r > 0; });
        long product = 1;
        bool small = J <= 2;
        if (known)
            for (int r : profile)
            {
                small = small && codebook.size(r) <= 16;
                product *= codebook.size(r);
            }
        if (sampling.mode == SamplingMode::exhaustive && known && small && product <= max_exhaustive)
        {
            ds.exhaustive = true;
            ds.n_draws = static_cast<int>(product);
            std::vector<int> idx(J, 0);
            for (long d = 0; d < product; ++d)
            {
                ds.rank.emplace_back(profile.begin(), profile.end());
                ds.index.push_back(idx);
                for (int j = J - 1; j >= 0; --j)
                {
                    if (++idx[j] < codebook.size(profile[j]))
                        break;
                    idx[j] = 0;
                }
            }
            return ds;
        }

        // Monte-Carlo: two raw words per (draw, interferer) regardless of the profile, so the same
        // underlying draws are shared by every profile evaluated for a report.
        Engine rng = make_engine(sampling.seed, Stream::draws);
        ds.n_draws = sampling.draws;
        const auto span_r = static_cast<std::uint64_t>(rank_max - rank_min + 1);
        for (int d = 0; d < sampling.draws; ++d)
        {
            std::vector<int> rk(J), ix(J);
            for (int j = 0; j < J; ++j)
            {
                const std::uint64_t u1 = rng(), u2 = rng();
                rk[j] = profile[j] > 0 ? profile[j] : rank_min + static_cast<int>(u1 % span_r);
                ix[j] = static_cast<int>(u2 % static_cast<std::uint64_t>(codebook.size(rk[j])));
            }
            ds.rank.push_back(std::move(rk));
            ds.index.push_back(std::move(ix));
        }
        return ds;
    }

    RateEvaluator::RateEvaluator(const TerminalView &view, const phy::Codebook &codebook, phy::ReceiverStrategy strategy,
                                 double rate_cap, const simd::KernelTable &kernels)
        : view_(view), cb_(codebook), strategy_(strategy), cap_(rate_cap), k_(kernels)
    {
        if (view.n_tx != codebook.n_tx)
            throw std::invalid_argument("codebook does not match the terminal's transmit antennas");
        const std::size_t n = static_cast<std::size_t>(view.n_interferers()) * view.n_blocks() * cb_.max_rank() * cb_.size(1);
        prod_.resize(n);
        prod_ok_.assign(n, 0);
    }

    const CMat &RateEvaluator::interferer_product(int j, int blk, int rank, int index)
    {
        const std::size_t key = ((static_cast<std::size_t>(j) * view_.n_blocks() + blk) * cb_.max_rank() + (rank - 1)) * cb_.size(1) + index;
        if (!prod_ok_[key])
        {
            const double a = std::sqrt(view_.alpha_interferers[j] * view_.power / rank);
            prod_[key] = a * (view_.interferers[j][blk] * cb_.at(rank, index));
            prod_ok_[key] = 1;
        }
        return prod_[key];
    }

    void RateEvaluator::prepare(const DrawSet &draws)
    {
        draws_ = draws;
        const int nb = view_.n_blocks(), D = draws.n_draws, nr = view_.n_rx, nt = view_.n_tx;
        const int J = view_.n_interferers();
        const int n = nb * D;

        if (strategy_ == phy::ReceiverStrategy::mmse_irc_simplified)
        {
            q_simpl_.assign(nb, CMat());
            for (int b = 0; b < nb; ++b)
            {
                CMat q = CMat::Zero(nr, nr);
                for (int j = 0; j < J; ++j)
                    q.noalias() += (view_.alpha_interferers[j] * view_.power / nt) * view_.interferers[j][b] * view_.interferers[j][b].adjoint();
                const double tr = q.trace().real() + nr * view_.noise;
                q.diagonal().array() += phy::regularization_floor(view_.noise, tr, nr);
                q_simpl_[b] = q;
            }
            keys_.assign(J, {});
            key_of_.assign(static_cast<std::size_t>(D) * J, 0);
            for (int j = 0; j < J; ++j)
            {
                std::map<std::pair<int, int>, int> slot;
                for (int d = 0; d < D; ++d)
                {
                    const auto [it, fresh] = slot.emplace(std::pair{draws.rank[d][j], draws.index[d][j]}, static_cast<int>(keys_[j].size()));
                    if (fresh)
                        keys_[j].push_back(it->first);
                    key_of_[static_cast<std::size_t>(d) * J + j] = it->second;
                }
            }
            return;
        }

        simd::CBatch q(nr, nr, n), h(nr, nt, n);
        x_.resize(nr, nt, n);
        for (int b = 0; b < nb; ++b)
            for (int d = 0; d < D; ++d)
            {
                const int item = b * D + d;
                CMat qm = CMat::Zero(nr, nr);
                for (int j = 0; j < J; ++j)
                {
                    const CMat &p = interferer_product(j, b, draws.rank[d][j], draws.index[d][j]);
                    qm.noalias() += p * p.adjoint();
                }
                const double tr = qm.trace().real() + nr * view_.noise;
                qm.diagonal().array() += phy::regularization_floor(view_.noise, tr, nr);
                q.set_matrix(item, qm);
                h.set_matrix(item, view_.serving[b]);
            }
        simd::whiten(k_, q, h, x_);
    }

    void RateEvaluator::rates_ideal(const CMat &f, std::vector<double> &per_item)
    {
        const int L = static_cast<int>(f.cols());
        const int n = x_.size();
        if (y_.rows() != x_.rows() || y_.cols() != L || y_.size() != n)
            y_.resize(x_.rows(), L, n);
        simd::project(k_, x_, f, y_);
        simd::mmse_diag(k_, y_, view_.alpha_serving * view_.power / L, d_);
        // sum_m min(-log2 d_m, cap) with a single logarithm per item
        const double dmin = std::exp2(-cap_);
        const int stride = y_.stride();
        per_item.resize(n);
        for (int i = 0; i < n; ++i)
        {
            double prod = 1.0;
            int capped = 0;
            for (int m = 0; m < L; ++m)
            {
                const double dm = std::min(d_[static_cast<std::size_t>(m) * stride + i], 1.0);
                if (dm <= dmin)
                    ++capped;
                else
                    prod *= dm;
            }
            per_item[i] = -std::log2(prod) + cap_ * capped;
        }
    }

    void RateEvaluator::rates_simplified(const CMat &f, std::vector<double> &per_item)
    {
        const int L = static_cast<int>(f.cols());
        const int nb = view_.n_blocks(), D = draws_.n_draws, J = view_.n_interferers();
        const double s = view_.alpha_serving * view_.power / L;
        per_item.resize(static_cast<std::size_t>(nb) * D);
        std::vector<std::vector<double>> leak_tab(J); // [slot * L + m]
        std::vector<double> base(L);
        for (int b = 0; b < nb; ++b)
        {
            const CMat hf = view_.serving[b] * f;
            CMat r = q_simpl_[b];
            r.noalias() += s * hf * hf.adjoint();
            const CMat g = s * r.llt().solve(hf).adjoint();
            const CMat ghf = g * hf;
            for (int m = 0; m < L; ++m)
            {
                double intra = 0.0;
                for (int nn = 0; nn < L; ++nn)
                    if (nn != m)
                        intra += std::norm(ghf(m, nn));
                base[m] = s * intra + view_.noise * g.row(m).squaredNorm();
            }
            for (int j = 0; j < J; ++j)
            {
                const CMat bj = g * view_.interferers[j][b];
                leak_tab[j].resize(keys_[j].size() * L);
                for (std::size_t k = 0; k < keys_[j].size(); ++k)
                {
                    const auto [rj, ix] = keys_[j][k];
                    const CMat p = bj * cb_.at(rj, ix);
                    const double a = view_.alpha_interferers[j] * view_.power / rj;
                    for (int m = 0; m < L; ++m)
                        leak_tab[j][k * L + m] = a * p.row(m).squaredNorm();
                }
            }
            for (int d = 0; d < D; ++d)
            {
                double rate = 0.0;
                for (int m = 0; m < L; ++m)
                {
                    double den = base[m];
                    for (int j = 0; j < J; ++j)
                        den += leak_tab[j][static_cast<std::size_t>(key_of_[static_cast<std::size_t>(d) * J + j]) * L + m];
                    const double rho = s * std::norm(ghf(m, m)) / den;
                    rate += std::min(std::log2(1.0 + rho), cap_);
                }
                per_item[static_cast<std::size_t>(b) * D + d] = rate;
            }
        }
    }

    std::vector<double> RateEvaluator::subband_rates(const CMat &f)
    {
        if (f.rows() != view_.n_tx || f.cols() < 1)
            throw std::invalid_argument("precoder does not match the channel");
        std::vector<double> per_item;
        if (strategy_ == phy::ReceiverStrategy::mmse_irc_ideal)
            rates_ideal(f, per_item);
        else
            rates_simplified(f, per_item);
        const int D = draws_.n_draws;
        std::vector<double> out(view_.n_subbands(), 0.0);
        for (int k = 0; k < view_.n_subbands(); ++k)
            for (const auto &[b, w] : view_.subbands[k])
            {
                double acc = 0.0;
                for (int d = 0; d < D; ++d)
                    acc += per_item[static_cast<std::size_t>(b) * D + d];
                out[k] += w * acc / D;
            }
        return out;
    }

    std::vector<double> expected_rate(const TerminalView &view, const CMat &f, std::span<const int> interferer_ranks,
                                      const phy::Codebook &codebook, phy::ReceiverStrategy strategy,
                                      const Sampling &sampling, double rate_cap, int rank_min, int rank_max)
    {
        if (static_cast<int>(interferer_ranks.size()) != view.n_interferers())
            throw std::invalid_argument("one interferer rank per measured cell expected");
        RateEvaluator ev(view, codebook, strategy, rate_cap);
        ev.prepare(make_draws(interferer_ranks, codebook, rank_min, rank_max, sampling));
        return ev.subband_rates(f);
    }

    double FeedbackReport::best_score() const
    {
        return score.at(static_cast<std::size_t>(serving_ri - rank_min) * n_profiles + best_profile);
    }

    int FeedbackReport::profile_of(int i) const
    {
        if (!rank_recommendation)
            return -1;
        for (int p = 0; p < n_profiles; ++p)
        {
            const auto &pr = profiles[p];
            if (pr.empty())
                return i >= rank_min && i < rank_min + n_profiles ? i - rank_min : -1;
            if (std::all_of(pr.begin(), pr.end(), [i](int v) { return v == i; }))
                return p;
        }
        return -1;
    }

    int quantize_uniform(double value, int bits, double lo, double hi)
    {
        const int top = (1 << bits) - 1;
        if (std::isnan(value) || value <= lo)
            return 0;
        if (value >= hi)
            return top;
        const double step = (hi - lo) / top;
        return std::clamp(static_cast<int>(std::lround((value - lo) / step)), 0, top);
    }

    double dequantize_uniform(int level, int bits, double lo, double hi)
    {
        const int top = (1 << bits) - 1;
        return lo + std::clamp(level, 0, top) * (hi - lo) / top;
    }

    int quantize_cqi(double rate, int rank, const FeedbackConfig &cfg)
    {
        if (cfg.cqi_domain == CqiDomain::rate)
            return quantize_uniform(rate, cfg.cqi_bits, cfg.cqi_lo, cfg.cqi_hi);
        const double per_stream = rate / rank;
        if (!(per_stream > 0.0))
            return 0;
        return quantize_uniform(linear_to_db(std::exp2(per_stream) - 1.0), cfg.cqi_bits, cfg.cqi_lo, cfg.cqi_hi);
    }

    double cqi_rate(int level, int rank, const FeedbackConfig &cfg, double offset_db)
    {
        if (level <= 0)
            return 0.0; // out of range
        double sinr_db;
        if (cfg.cqi_domain == CqiDomain::rate)
        {
            const double r = dequantize_uniform(level, cfg.cqi_bits, cfg.cqi_lo, cfg.cqi_hi) / rank;
            sinr_db = linear_to_db(std::exp2(r) - 1.0);
        }
        else
            sinr_db = dequantize_uniform(level, cfg.cqi_bits, cfg.cqi_lo, cfg.cqi_hi);
        return rank * std::min(cfg.rate_cap, std::log2(1.0 + db_to_linear(sinr_db - cfg.backoff_db + offset_db)));
    }

    double delta_loss(const FeedbackReport &r, int l, int i, const FeedbackConfig &cfg)
    {
        if (!cfg.delta_cqi || r.delta_cqi.empty())
            return 0.0;
        const int p = r.profile_of(i);
        if (p < 0 || l < r.rank_min || (l - r.rank_min) * r.n_profiles >= static_cast<int>(r.delta_cqi.size()))
            return 0.0;
        return dequantize_uniform(r.delta_cqi[static_cast<std::size_t>(l - r.rank_min) * r.n_profiles + p], cfg.delta_bits, 0.0, cfg.delta_hi);
    }

    namespace
    {
        bool better(double a, double b, double tol)
        {
            return a > b + tol * std::max(1.0, std::abs(b));
        }
    } // namespace

    FeedbackReport select_ranks_and_precoders(const TerminalView &view, const phy::Codebook &codebook,
                                              const FeedbackConfig &cfg, std::uint64_t draw_seed,
                                              const simd::KernelTable &kernels)
    {
        if (cfg.rank_max > codebook.max_rank() || cfg.rank_min < 1 || cfg.rank_min > cfg.rank_max)
            throw std::invalid_argument("rank bounds exceed the codebook");
        const int J = view.n_interferers(), K = view.n_subbands();
        const bool rr = cfg.mode == ReportMode::rank_recommendation;

        // Interferer-rank profiles: one per candidate I (common mode) or all tuples (per-cell mode).
        std::vector<std::vector<int>> profiles;
        if (!rr)
            profiles.push_back(std::vector<int>(J, 0));
        else if (J == 0)
            for (int i = cfg.rank_min; i <= cfg.rank_max; ++i)
                profiles.push_back({});
        else if (!cfg.per_cell_iri)
            for (int i = cfg.rank_min; i <= cfg.rank_max; ++i)
                profiles.push_back(std::vector<int>(J, i));
        else
        {
            std::vector<int> t(J, cfg.rank_min);
            for (;;)
            {
                profiles.push_back(t);
                int j = J - 1;
                while (j >= 0 && t[j] == cfg.rank_max)
                    t[j--] = cfg.rank_min;
                if (j < 0)
                    break;
                ++t[j];
            }
        }
        const int P = static_cast<int>(profiles.size());
        const int NL = cfg.rank_max - cfg.rank_min + 1;

        // best[(L, p)][k] = (max over F of T~, argmax)
        std::vector<std::vector<double>> best_val(static_cast<std::size_t>(NL) * P);
        std::vector<std::vector<int>> best_idx(static_cast<std::size_t>(NL) * P);
        RateEvaluator ev(view, codebook, cfg.receiver, cfg.rate_cap, kernels);
        const Sampling sampling{cfg.sampling, cfg.draws, draw_seed};
        for (int p = 0; p < P; ++p)
        {
            if (p > 0 && J == 0)
            {
                // nothing to average over: every profile sees the same interference-free channel
                for (int l = 0; l < NL; ++l)
                {
                    best_val[l * P + p] = best_val[l * P];
                    best_idx[l * P + p] = best_idx[l * P];
                }
                continue;
            }
            ev.prepare(make_draws(profiles[p], codebook, cfg.rank_min, cfg.rank_max, sampling, cfg.max_exhaustive));
            for (int l = 0; l < NL; ++l)
            {
                const int L = cfg.rank_min + l;
                auto &bv = best_val[l * P + p];
                auto &bi = best_idx[l * P + p];
                bv.assign(K, -1.0);
                bi.assign(K, -1);
                for (int c = 0; c < codebook.size(L); ++c)
                {
                    const auto t = ev.subband_rates(codebook.at(L, c));
                    for (int k = 0; k < K; ++k)
                        if (bi[k] < 0 || better(t[k], bv[k], cfg.tie_tolerance))
                        {
                            bv[k] = t[k];
                            bi[k] = c;
                        }
                }
            }
        }

        FeedbackReport r;
        r.rank_recommendation = rr;
        r.rank_min = cfg.rank_min;
        r.n_profiles = P;
        r.profiles = profiles;
        r.score.resize(static_cast<std::size_t>(NL) * P);
        int bl = 0, bp = 0;
        for (int l = 0; l < NL; ++l)
            for (int p = 0; p < P; ++p)
            {
                double acc = 0.0;
                for (double v : best_val[l * P + p])
                    acc += v;
                r.score[l * P + p] = acc / K;
                if (better(r.score[l * P + p], r.score[bl * P + bp], cfg.tie_tolerance))
                {
                    bl = l;
                    bp = p;
                }
            }
        r.serving_ri = cfg.rank_min + bl;
        r.best_profile = bp;
        if (rr)
        {
            r.per_cell_iri = profiles[bp];
            r.recommended_iri = J == 0 ? cfg.rank_min + bp : profiles[bp][0];
        }
        r.pmi = best_idx[bl * P + bp];
        r.estimated = best_val[bl * P + bp];
        r.cqi.resize(K);
        for (int k = 0; k < K; ++k)
            r.cqi[k] = quantize_cqi(r.estimated[k], r.serving_ri, cfg);
        if (cfg.delta_cqi && rr)
        {
            const double top = r.score[bl * P + bp];
            r.delta_cqi.resize(r.score.size());
            for (std::size_t i = 0; i < r.score.size(); ++i)
                r.delta_cqi[i] = quantize_uniform(std::max(0.0, top - r.score[i]), cfg.delta_bits, 0.0, cfg.delta_hi);
        }
        return r;
    }

} // namespace rrsim::feedback
