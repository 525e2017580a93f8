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
#include <string>
#include <variant>
#include <vector>

namespace rrsim::sched
{
    // A victim asks an interfering cell to transmit at rank iri.
    struct RankRequest
    {
        int victim = -1;
        int victim_cell = -1;
        int target_cell = -1;
        int iri = 0;
        double w_tilde = 0.0; // effective QoS weight
    };

    // A cell announces its rank priorities and master-rank sequence to its cluster.
    struct PatternBroadcast
    {
        int cell = -1;
        std::vector<int> priority;
        std::vector<int> sequence;
    };

    // Binary state of the master for one future subframe: 1 when U_M1 is non-empty and honoured.
    struct MasterState
    {
        int cluster = -1;
        int master = -1;
        int subframe = -1; // subframe the state applies to
        int rank = 0;      // L_M
        bool state = false;
    };

    using Message = std::variant<RankRequest, PatternBroadcast, MasterState>;

    struct Envelope
    {
        Message message;
        int send = 0;
        int deliver = 0;
        std::uint64_t seq = 0;
    };

    const char *kind_name(const Message &m);

    struct BusLatency
    {
        int rank_request = 2;
        int pattern_broadcast = 10;
        int master_state = 2;
    };

    // Append-only message bus with per-kind backhaul latency. Messages become visible only at or after
    // their delivery subframe and are handed out once, in posting order.
    class CoordinationBus
    {
    public:
        explicit CoordinationBus(BusLatency latency = {}) : latency_(latency) {}

        int latency_of(const Message &m) const;
        const Envelope &post(Message m, int now);
        // Messages with deliver <= now that were not handed out before.
        std::vector<Envelope> deliver(int now);
        const std::vector<Envelope> &log() const { return log_; }
        std::size_t pending() const { return next_.size(); }

    private:
        BusLatency latency_;
        std::vector<Envelope> log_;
        std::vector<std::size_t> next_; // indices not yet delivered
    };

} // namespace rrsim::sched
