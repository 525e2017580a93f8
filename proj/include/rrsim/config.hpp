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
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rrsim/channel.hpp"
#include "rrsim/feedback.hpp"
#include "rrsim/scheduler.hpp"
#include "rrsim/topology.hpp"

namespace rrsim
{
    using Json = nlohmann::ordered_json;

    struct OfdmConfig
    {
        int n_subbands = 12;
        int subcarriers_per_subband = 4;
        int n_subcarriers() const { return n_subbands * subcarriers_per_subband; }
    };

    struct ChannelConfig
    {
        int coherence = 2;                  // subcarriers per independent block
        double doppler_hz = 5.56;           // 3 km/h at 2 GHz
        double ar_coefficient = -1.0;       // < 0: derived from doppler_hz
        channel::CorrelationSpec correlation;
        channel::MeasurementErrorModel error;

        double ar() const;
    };

    struct RunConfig
    {
        int n_drops = 20;
        int n_subframes = 200;
        int feedback_period = 5;
        int feedback_delay = 6;
        int warmup = -1; // < 0: max(feedback_delay, pf_horizon)
    };

    struct SimConfig
    {
        std::uint64_t seed = 1;
        topology::NetworkConfig network;
        ChannelConfig channel;
        OfdmConfig ofdm;
        RunConfig sim;
        feedback::FeedbackConfig feedback;
        int codebook_bits = 4;
        phy::ReceiverStrategy receiver = phy::ReceiverStrategy::mmse_irc_ideal;
        sched::SchedulerConfig scheduler;
        sched::CyclingConfig cycling;

        void validate() const;
        int warmup_subframes() const;
        // Feedback settings actually used by terminals: report mode follows the scheduler kind,
        // receiver and rank bounds follow their own sections.
        feedback::FeedbackConfig effective_feedback() const;
    };

    // Complete tree of every known key with its default value.
    Json default_config_json();
    Json config_to_json(const SimConfig &cfg);
    // Strict: unknown keys and type mismatches raise ConfigError. Missing keys keep their defaults.
    SimConfig config_from_json(const Json &j);

    // Applies "a.b.c=value"; the value is parsed as JSON when possible and taken as a string otherwise.
    void apply_override(Json &j, std::string_view assignment);

    Json load_config_json(const std::string &path, std::span<const std::string> overrides = {});
    SimConfig load_config(const std::string &path, std::span<const std::string> overrides = {});

} // namespace rrsim
