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

#include "rrsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "rrsim/pricing.hpp"
#include "rrsim/rng.hpp"

namespace rrsim::sim
{
    double percentile(std::vector<double> v, double p)
    {
        if (v.empty())
            return 0.0;
        std::sort(v.begin(), v.end());
        const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * (v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - lo) * (v[hi] - v[lo]);
    }

    std::shared_ptr<const ReportCache::DropReports> ReportCache::find(const std::string &key) const
    {
        std::lock_guard lk(mu_);
        const auto it = map_.find(key);
        return it == map_.end() ? nullptr : it->second;
    }

    void ReportCache::store(const std::string &key, std::shared_ptr<const DropReports> reports)
    {
        std::lock_guard lk(mu_);
        map_[key] = std::move(reports);
    }

    std::size_t ReportCache::size() const
    {
        std::lock_guard lk(mu_);
        return map_.size();
    }

    std::string report_signature(const SimConfig &cfg)
    {
        Json j = config_to_json(cfg);
        Json s;
        for (const char *k : {"seed", "network", "channel", "ofdm", "feedback", "receiver"})
            s[k] = j[k];
        s["sim"] = {{"n_subframes", cfg.sim.n_subframes}, {"feedback_period", cfg.sim.feedback_period}, {"feedback_delay", cfg.sim.feedback_delay}};
        s["report_mode"] = cfg.effective_feedback().mode == feedback::ReportMode::baseline ? "baseline" : "rr";
        return s.dump();
    }

    bool comparable(const Json &a, const Json &b, std::string *why)
    {
        Json x = config_to_json(config_from_json(a)), y = config_to_json(config_from_json(b));
        for (Json *j : {&x, &y})
        {
            j->erase("receiver");
            j->erase("cycling");
            (*j)["scheduler"].erase("kind");
        }
        if (x == y)
            return true;
        if (why)
        {
            for (auto it = x.begin(); it != x.end(); ++it)
                if (it.value() != y[it.key()])
                {
                    *why = "configs differ in section '" + it.key() + "'";
                    break;
                }
        }
        return false;
    }

    namespace
    {
        struct PatternHistory
        {
            std::vector<std::pair<int, sched::CyclingPattern>> entries; // (effective from, pattern)

            const sched::CyclingPattern &at(int t) const
            {
                const sched::CyclingPattern *p = &entries.front().second;
                for (const auto &[from, pat] : entries)
                    if (from <= t)
                        p = &pat;
                return *p;
            }
        };

        double effective_weight(const feedback::FeedbackReport &r, double w_s, const feedback::FeedbackConfig &fc)
        {
            if (!fc.delta_cqi)
                return w_s;
            double acc = 0.0;
            int n = 0;
            for (int l = fc.rank_min; l <= fc.rank_max; ++l)
            {
                if (l == r.recommended_iri)
                    continue;
                acc += feedback::delta_loss(r, r.serving_ri, l, fc) / std::abs(l - r.recommended_iri);
                ++n;
            }
            return n ? w_s * acc / n : 0.0;
        }

        class DropRunner
        {
        public:
            DropRunner(const SimConfig &cfg, int drop, ReportCache *cache, TraceSink *sink)
                : cfg_(cfg), drop_(drop), cache_(cache), sink_(sink), fc_(cfg.effective_feedback()),
                  bus_(cfg.scheduler.latency)
            {
            }

            struct Result
            {
                std::vector<double> user_sum; // realized band-average rate summed over measured subframes
                double cell_sum = 0.0;        // sum over cells and measured subframes
                int measured = 0;
                std::int64_t allocations = 0, outages = 0, comp_allocations = 0;
                std::vector<std::int64_t> rank_all, rank_comp, iri_hist;
                std::int64_t comp_reports = 0;
                AuditTotals audit;
            };

            Result run(StreamChecksum &checksum);
            const topology::Deployment &deployment() const { return dep_; }
            const topology::CompSets &comp() const { return comp_; }

        private:
            void setup(StreamChecksum &checksum);
            std::vector<sched::ReportPtr> compute_reports(int t, const channel::ChannelRealization &h);
            void apply_reports(int t, const std::vector<sched::ReportPtr> &reps);
            void handle(const sched::Envelope &e);
            void post(sched::Message m, int t);
            void update_patterns(int t);
            void commit_masters(int t);
            void audit(int t, const sched::SchedulingGrid &grid, bool measured);

            const SimConfig &cfg_;
            int drop_;
            ReportCache *cache_;
            TraceSink *sink_;
            feedback::FeedbackConfig fc_;
            sched::CoordinationBus bus_;
            Result res_;

            std::uint64_t seed_ = 0;
            topology::Deployment dep_;
            topology::CompSets comp_;
            std::vector<std::vector<int>> clusters_;
            std::vector<int> cluster_of_cell_;
            std::vector<std::vector<int>> modeled_;
            std::vector<double> white_real_, white_fb_, wideband_db_;
            phy::Codebook cb_;
            std::vector<std::vector<std::pair<int, double>>> subbands_;
            sched::PfState pf_;
            std::vector<sched::ReportPtr> current_;
            std::vector<std::map<int, sched::RankRequest>> requests_; // per cell, latest request per victim
            std::vector<PatternHistory> patterns_;
            std::map<int, std::vector<sched::MasterCommit>> commits_; // target subframe -> per cluster
            std::set<std::pair<int, int>> delivered_state_;           // (subframe, cluster)
            bool ms_ = false;
        };

        void DropRunner::setup(StreamChecksum &checksum)
        {
            const auto &net = cfg_.network;
            seed_ = derive_seed(cfg_.seed, Stream::drop, {static_cast<std::uint64_t>(drop_)});
            dep_ = topology::build_layout(net, seed_);
            comp_ = topology::derive_comp_sets(dep_.large_scale, dep_.serving, net.delta_db);
            const int nu = dep_.large_scale.n_users, nc = net.n_cells;
            cluster_of_cell_.assign(nc, 0);
            for (int c = 0; c < net.n_clusters(); ++c)
            {
                clusters_.emplace_back();
                for (int i = 0; i < net.cluster_size; ++i)
                {
                    clusters_.back().push_back(c * net.cluster_size + i);
                    cluster_of_cell_[c * net.cluster_size + i] = c;
                }
            }
            const auto &ls = dep_.large_scale;
            modeled_.assign(nu, {});
            white_real_.assign(nu, 0.0);
            white_fb_.assign(nu, 0.0);
            wideband_db_.assign(nu, 0.0);
            for (int q = 0; q < nu; ++q)
            {
                const int s = dep_.serving[q];
                const auto &cl = clusters_[cluster_of_cell_[s]];
                std::set<int> m(cl.begin(), cl.end());
                m.insert(comp_.measurement_set[q].begin(), comp_.measurement_set[q].end());
                modeled_[q].assign(m.begin(), m.end());
                double other = 0.0;
                white_real_[q] = white_fb_[q] = net.noise_power + ls.background[q];
                for (int j = 0; j < nc; ++j)
                {
                    if (j == s)
                        continue;
                    const double p = ls(q, j) * net.tx_power;
                    other += p;
                    if (!m.count(j))
                        white_real_[q] += p;
                    if (!comp_.in_measurement_set(q, j))
                        white_fb_[q] += p;
                }
                wideband_db_[q] = linear_to_db(ls(q, s) * net.tx_power / (other + ls.background[q] + net.noise_power));
            }
            cb_ = phy::build_codebook(net.n_tx, cfg_.codebook_bits);
            subbands_ = feedback::subband_blocks(cfg_.ofdm.n_subbands, cfg_.ofdm.subcarriers_per_subband, cfg_.channel.coherence);
            pf_ = sched::PfState(nu, cfg_.scheduler.pf_horizon, cfg_.scheduler.pf_epsilon);
            current_.assign(nu, nullptr);
            requests_.assign(nc, {});
            ms_ = cfg_.scheduler.kind == sched::SchedulerKind::master_slave;
            const sched::CyclingPattern initial = sched::derive_cycling_pattern({}, net.rank_min, net.rank_max, cfg_.cycling);
            patterns_.assign(nc, PatternHistory{{{0, initial}}});

            const int nr = net.rank_max;
            res_.user_sum.assign(nu, 0.0);
            res_.rank_all.assign(nr, 0);
            res_.rank_comp.assign(nr, 0);
            res_.iri_hist.assign(nr, 0);
            checksum.add(ls.alpha.data(), ls.alpha.size() * sizeof(double));
        }

        std::vector<sched::ReportPtr> DropRunner::compute_reports(int t, const channel::ChannelRealization &h)
        {
            const auto meas = channel::apply_measurement_error(h, cfg_.channel.error, wideband_db_,
                                                               derive_seed(seed_, Stream::measurement));
            const auto &ls = dep_.large_scale;
            const int nu = ls.n_users, nb = h.dims().n_blocks();
            std::vector<sched::ReportPtr> out(nu);
            for (int q = 0; q < nu; ++q)
            {
                feedback::TerminalView v;
                v.n_rx = cfg_.network.n_rx;
                v.n_tx = cfg_.network.n_tx;
                const int s = dep_.serving[q];
                for (int b = 0; b < nb; ++b)
                    v.serving.push_back(meas.block(q, s, b));
                for (int j : comp_.measurement_set[q])
                {
                    v.interferers.emplace_back();
                    for (int b = 0; b < nb; ++b)
                        v.interferers.back().push_back(meas.block(q, j, b));
                    v.alpha_interferers.push_back(ls(q, j));
                }
                v.alpha_serving = ls(q, s);
                v.power = cfg_.network.tx_power;
                v.noise = white_fb_[q];
                v.subbands = subbands_;
                auto r = std::make_shared<feedback::FeedbackReport>(feedback::select_ranks_and_precoders(
                    v, cb_, fc_, derive_seed(seed_, Stream::draws, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(q)})));
                r->user = q;
                out[q] = std::move(r);
            }
            return out;
        }

        void DropRunner::post(sched::Message m, int t)
        {
            const auto &e = bus_.post(std::move(m), t);
            if (sink_)
                sink_->message(drop_, e);
        }

        void DropRunner::apply_reports(int t, const std::vector<sched::ReportPtr> &reps)
        {
            for (std::size_t qi = 0; qi < reps.size(); ++qi)
            {
                const int q = static_cast<int>(qi);
                current_[q] = reps[q];
                const auto &r = *reps[q];
                if (sink_)
                    sink_->report(drop_, t, q, r);
                if (comp_.is_comp_user(q) && r.rank_recommendation)
                {
                    ++res_.comp_reports;
                    if (r.recommended_iri >= 1 && r.recommended_iri <= static_cast<int>(res_.iri_hist.size()))
                        ++res_.iri_hist[r.recommended_iri - 1];
                }
                if (!ms_ || !r.rank_recommendation)
                    continue;
                const auto &m = comp_.measurement_set[q];
                const double w = effective_weight(r, pf_.weight(q), fc_);
                for (std::size_t j = 0; j < m.size(); ++j)
                {
                    const int iri = r.per_cell_iri.size() == m.size() ? r.per_cell_iri[j] : r.recommended_iri;
                    post(sched::RankRequest{q, dep_.serving[q], m[j], iri, w}, t);
                }
            }
            if (fc_.delta_cqi && t >= cfg_.warmup_subframes())
            {
                std::vector<const feedback::FeedbackReport *> raw(reps.size(), nullptr);
                for (std::size_t q = 0; q < reps.size(); ++q)
                    if (reps[q]->rank_recommendation)
                        raw[q] = reps[q].get();
                res_.audit.concavity_violations += pricing::compute_prices(raw, comp_.measurement_set, fc_).concavity_violations;
            }
        }

        void DropRunner::handle(const sched::Envelope &e)
        {
            if (const auto *req = std::get_if<sched::RankRequest>(&e.message))
                requests_[req->target_cell][req->victim] = *req;
            else if (const auto *st = std::get_if<sched::MasterState>(&e.message))
                delivered_state_.insert({st->subframe, st->cluster});
            // pattern broadcasts are recorded in the history with their delivery subframe at posting time
        }

        void DropRunner::update_patterns(int t)
        {
            const auto &net = cfg_.network;
            for (int c = 0; c < net.n_cells; ++c)
            {
                std::vector<double> counts(net.rank_max - net.rank_min + 1, 0.0);
                for (const auto &[victim, req] : requests_[c])
                    if (req.iri >= net.rank_min && req.iri <= net.rank_max)
                        counts[req.iri - net.rank_min] +=
                            cfg_.cycling.weighting == sched::PatternWeighting::weighted ? req.w_tilde : 1.0;
                auto pat = sched::derive_cycling_pattern(counts, net.rank_min, net.rank_max, cfg_.cycling);
                const auto &last = patterns_[c].entries.back().second;
                if (pat.priority == last.priority && pat.sequence == last.sequence)
                    continue;
                post(sched::PatternBroadcast{c, pat.priority, pat.sequence}, t);
                patterns_[c].entries.push_back({t + cfg_.scheduler.latency.pattern_broadcast, std::move(pat)});
            }
        }

        void DropRunner::commit_masters(int t)
        {
            const int target = t + cfg_.scheduler.latency.master_state;
            if (target >= cfg_.sim.n_subframes)
                return;
            std::vector<sched::MasterCommit> per_cluster;
            for (int cl = 0; cl < static_cast<int>(clusters_.size()); ++cl)
            {
                const auto &cells = clusters_[cl];
                sched::MasterCommit mc;
                mc.master = sched::master_of(cells, target);
                mc.rank = sched::master_rank(patterns_[mc.master].at(target), target, static_cast<int>(cells.size()));
                const auto parts = sched::partition_master_users(dep_.served[mc.master], mc.rank, current_);
                mc.state = !requests_[mc.master].empty() && !parts.first.empty();
                if (mc.state)
                    mc.um1 = sched::candidates_of(parts.first, current_);
                post(sched::MasterState{cl, mc.master, target, mc.rank, mc.state}, t);
                per_cluster.push_back(std::move(mc));
            }
            commits_[target] = std::move(per_cluster);
        }

        void DropRunner::audit(int t, const sched::SchedulingGrid &grid, bool measured)
        {
            const int K = grid.n_subbands(), nc = grid.n_cells();
            const auto commit_it = commits_.find(t);
            for (int i = 0; i < nc; ++i)
                for (int k = 0; k < K; ++k)
                {
                    const auto &a = grid.at(i, k);
                    AuditRow row{drop_, t, i, k, 0.0, 0.0, 0.0, true, 0};
                    if (a.user >= 0)
                        row.weighted_rate = pf_.weight(a.user) * a.scheduled;
                    for (int j = 0; j < nc; ++j)
                    {
                        if (j == i)
                            continue;
                        const auto &v = grid.at(j, k);
                        if (v.user < 0 || !current_[v.user] || !comp_.in_measurement_set(v.user, i))
                            continue;
                        const auto &rep = *current_[v.user];
                        if (!rep.rank_recommendation)
                            continue;
                        ++row.victims;
                        const double term = a.user >= 0 ? pricing::payment_term(rep, pf_.weight(v.user), a.rank, fc_) : 0.0;
                        row.payment += term;
                        if (a.user >= 0 && a.rank != rep.recommended_iri)
                            row.honored = false;
                        // Observation 3: a U_S1 victim scheduled while the master transmits at its I* pays nothing
                        if (v.group == sched::Group::slave_s1 && commit_it != commits_.end())
                        {
                            const auto &mc = commit_it->second[cluster_of_cell_[j]];
                            if (mc.master == i && a.user >= 0 && a.rank == mc.rank && rep.recommended_iri == mc.rank && measured)
                            {
                                ++res_.audit.us1_checks;
                                if (term != 0.0)
                                    ++res_.audit.violations;
                            }
                        }
                    }
                    row.surplus = row.weighted_rate - row.payment;
                    if (measured)
                    {
                        res_.audit.total_payment += row.payment;
                        res_.audit.total_weighted_rate += row.weighted_rate;
                        res_.audit.total_surplus += row.surplus;
                    }
                    if (sink_ && (a.user >= 0 || row.victims))
                        sink_->audit(row);
                }
        }

        DropRunner::Result DropRunner::run(StreamChecksum &checksum)
        {
            setup(checksum);
            const auto &net = cfg_.network;
            const int T = cfg_.sim.n_subframes, K = cfg_.ofdm.n_subbands;
            const int warmup = cfg_.warmup_subframes();
            const int period = cfg_.sim.feedback_period, delay = cfg_.sim.feedback_delay;

            channel::ChannelDims dims{dep_.large_scale.n_users, net.n_cells, net.n_rx, net.n_tx, cfg_.ofdm.n_subcarriers(), cfg_.channel.coherence};
            std::vector<char> links(static_cast<std::size_t>(dims.n_users) * dims.n_cells, 0);
            for (int q = 0; q < dims.n_users; ++q)
                for (int j : modeled_[q])
                    links[static_cast<std::size_t>(q) * dims.n_cells + j] = 1;
            channel::ChannelProcess proc(dims, links, cfg_.channel.correlation, cfg_.channel.ar(), derive_seed(seed_, Stream::channel));

            const std::string key = cache_ ? report_signature(cfg_) + "#" + std::to_string(drop_) : std::string();
            auto cached = cache_ ? cache_->find(key) : nullptr;
            auto fresh = cached ? nullptr : std::make_shared<ReportCache::DropReports>();

            std::deque<std::pair<int, std::vector<sched::ReportPtr>>> pending;
            sched::RealizationContext ctx;
            ctx.alpha = &dep_.large_scale;
            ctx.modeled = &modeled_;
            ctx.white = &white_real_;
            ctx.subbands = &subbands_;
            ctx.codebook = &cb_;
            ctx.receiver = cfg_.receiver;
            ctx.power = net.tx_power;
            ctx.rate_cap = fc_.rate_cap;
            ctx.link_adaptation = cfg_.scheduler.link_adaptation;

            for (int t = 0; t < T; ++t)
            {
                if (t > 0)
                    proc.advance();
                const auto &h = proc.current();
                checksum.add(h.raw().data(), h.raw().size() * sizeof(cdouble));

                if (t % period == 0 && t + delay < T)
                {
                    const std::size_t fi = static_cast<std::size_t>(t / period);
                    std::vector<sched::ReportPtr> reps;
                    if (cached)
                        reps = cached->at(fi);
                    else
                    {
                        reps = compute_reports(t, h);
                        fresh->push_back(reps);
                    }
                    pending.push_back({t + delay, std::move(reps)});
                }
                while (!pending.empty() && pending.front().first == t)
                {
                    apply_reports(t, pending.front().second);
                    pending.pop_front();
                }
                for (const auto &e : bus_.deliver(t))
                    handle(e);
                if (ms_)
                {
                    if (t % cfg_.cycling.update_period == 0)
                        update_patterns(t);
                    commit_masters(t);
                    for (const auto &e : bus_.deliver(t))
                        handle(e);
                }

                sched::SchedulingGrid grid(net.n_cells, K);
                std::vector<sched::Role> role(net.n_cells, sched::Role::none);
                std::vector<int> lm(net.n_cells, 0), slave_idx(net.n_cells, 0);
                if (ms_)
                {
                    const auto it = commits_.find(t);
                    for (int cl = 0; cl < static_cast<int>(clusters_.size()); ++cl)
                    {
                        const sched::MasterCommit *mc = nullptr;
                        if (it != commits_.end() && delivered_state_.count({t, cl}))
                            mc = &it->second[cl];
                        sched::schedule_subframe_ms(grid, clusters_[cl], dep_.served, mc, current_, comp_, pf_, fc_);
                        if (mc && mc->state)
                        {
                            int next_slave = 0;
                            for (int c : clusters_[cl])
                            {
                                role[c] = c == mc->master ? sched::Role::master : sched::Role::slave;
                                slave_idx[c] = c == mc->master ? 0 : ++next_slave;
                                lm[c] = mc->rank;
                            }
                        }
                    }
                }
                else
                    for (int c = 0; c < net.n_cells; ++c)
                        sched::schedule_subframe_baseline(grid, c, dep_.served[c], current_, pf_, fc_);

                const bool measured = t >= warmup;
                audit(t, grid, measured);
                ctx.h = &h;
                const auto user_rate = sched::realize_and_update(grid, ctx, pf_);

                for (int c = 0; c < net.n_cells; ++c)
                {
                    double cell_rate = 0.0;
                    for (int k = 0; k < K; ++k)
                    {
                        const auto &a = grid.at(c, k);
                        const bool is_comp = a.user >= 0 && comp_.is_comp_user(a.user);
                        if (sink_)
                            sink_->allocation({drop_, t, c, k, role[c], slave_idx[c], lm[c], &a, is_comp});
                        if (a.user < 0)
                            continue;
                        cell_rate += a.realized / K;
                        if (!measured)
                            continue;
                        ++res_.allocations;
                        if (a.scheduled > 0.0 && a.realized == 0.0)
                            ++res_.outages;
                        ++res_.rank_all[a.rank - 1];
                        if (is_comp)
                        {
                            ++res_.comp_allocations;
                            ++res_.rank_comp[a.rank - 1];
                        }
                    }
                    if (sink_)
                        sink_->cell_throughput(drop_, t, c, cell_rate);
                    if (measured)
                        res_.cell_sum += cell_rate;
                }
                if (measured)
                {
                    ++res_.measured;
                    for (std::size_t q = 0; q < user_rate.size(); ++q)
                        res_.user_sum[q] += user_rate[q];
                }
                commits_.erase(commits_.begin(), commits_.lower_bound(t));
            }
            if (fresh && cache_)
                cache_->store(key, fresh);
            return res_;
        }

        std::vector<double> normalise(const std::vector<std::int64_t> &counts)
        {
            std::int64_t total = 0;
            for (auto c : counts)
                total += c;
            std::vector<double> out(counts.size(), 0.0);
            if (total > 0)
                for (std::size_t i = 0; i < counts.size(); ++i)
                    out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
            return out;
        }

    } // namespace

    MetricsSummary run(const SimConfig &cfg, ReportCache *cache, TraceSink *sink)
    {
        cfg.validate();
        MetricsSummary m;
        m.n_drops = cfg.sim.n_drops;
        m.n_cells = cfg.network.n_cells;
        const int nr = cfg.network.rank_max;
        std::vector<std::int64_t> rank_all(nr, 0), rank_comp(nr, 0);
        m.iri_hist.assign(nr, 0);
        StreamChecksum checksum;
        double cell_sum = 0.0;
        std::int64_t comp_users = 0, users = 0;
        for (int d = 0; d < cfg.sim.n_drops; ++d)
        {
            DropRunner runner(cfg, d, cache, sink);
            const auto r = runner.run(checksum);
            m.measured_subframes = r.measured;
            cell_sum += r.cell_sum / (static_cast<double>(cfg.network.n_cells) * r.measured);
            m.allocations += r.allocations;
            m.outages += r.outages;
            m.comp_allocations += r.comp_allocations;
            m.comp_reports += r.comp_reports;
            for (int i = 0; i < nr; ++i)
            {
                rank_all[i] += r.rank_all[i];
                rank_comp[i] += r.rank_comp[i];
                m.iri_hist[i] += r.iri_hist[i];
            }
            m.audit.us1_checks += r.audit.us1_checks;
            m.audit.violations += r.audit.violations;
            m.audit.concavity_violations += r.audit.concavity_violations;
            m.audit.total_payment += r.audit.total_payment;
            m.audit.total_weighted_rate += r.audit.total_weighted_rate;
            m.audit.total_surplus += r.audit.total_surplus;
            const auto &dep = runner.deployment();
            m.n_users_per_drop = static_cast<int>(dep.serving.size());
            for (std::size_t q = 0; q < dep.serving.size(); ++q)
            {
                const bool c = runner.comp().is_comp_user(static_cast<int>(q));
                m.user_drop.push_back(d);
                m.user_id.push_back(static_cast<int>(q));
                m.user_cell.push_back(dep.serving[q]);
                m.user_comp.push_back(c);
                m.user_throughput.push_back(r.user_sum[q] / r.measured);
                comp_users += c;
                ++users;
            }
        }
        m.cell_average_se = cell_sum / cfg.sim.n_drops;
        m.cell_edge_se = percentile(m.user_throughput, 5.0);
        m.outage_rate = m.allocations ? static_cast<double>(m.outages) / static_cast<double>(m.allocations) : 0.0;
        m.rank_hist_all = normalise(rank_all);
        m.rank_hist_comp = normalise(rank_comp);
        m.comp_rank_ge2_fraction = 0.0;
        for (int i = 1; i < nr; ++i)
            m.comp_rank_ge2_fraction += m.rank_hist_comp[i];
        m.comp_user_fraction = users ? static_cast<double>(comp_users) / static_cast<double>(users) : 0.0;
        m.modal_iri = 0;
        for (int i = 0; i < nr; ++i)
            if (m.iri_hist[i] > 0 && (m.modal_iri == 0 || m.iri_hist[i] > m.iri_hist[m.modal_iri - 1]))
                m.modal_iri = i + 1;
        m.stream_checksum = checksum.value();
        return m;
    }

} // namespace rrsim::sim
