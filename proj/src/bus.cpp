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

#include "rrsim/bus.hpp"

#include <stdexcept>

namespace rrsim::sched
{
    const char *kind_name(const Message &m)
    {
        switch (m.index())
        {
        case 0:
            return "rank_request";
        case 1:
            return "pattern_broadcast";
        default:
            return "master_state";
        }
    }

    int CoordinationBus::latency_of(const Message &m) const
    {
        switch (m.index())
        {
        case 0:
            return latency_.rank_request;
        case 1:
            return latency_.pattern_broadcast;
        default:
            return latency_.master_state;
        }
    }

    const Envelope &CoordinationBus::post(Message m, int now)
    {
        const int lat = latency_of(m);
        if (lat < 0)
            throw std::invalid_argument("negative backhaul latency");
        log_.push_back({std::move(m), now, now + lat, log_.size()});
        next_.push_back(log_.size() - 1);
        return log_.back();
    }

    std::vector<Envelope> CoordinationBus::deliver(int now)
    {
        std::vector<Envelope> out;
        std::vector<std::size_t> keep;
        for (std::size_t i : next_)
        {
            if (log_[i].deliver <= now)
                out.push_back(log_[i]);
            else
                keep.push_back(i);
        }
        next_.swap(keep);
        return out;
    }

} // namespace rrsim::sched
