/*
 * Copyright 2026 The abisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "abisim/event_log.hpp"

namespace abisim {

namespace {

constexpr std::array<std::string_view, kNumEventClasses> kNames{
    "rf_read",  "l1_read",   "l2_read",   "write",   "st0_and",   "st1_shift",
    "st2_add",  "st3_add",   "st4_mul",   "ca_add",  "scale_div", "th_cmp",
    "lwsm_op",  "sp_detect", "base_instr_fetch_decode", "base_alu_mac", "base_rf_access"};

}  // namespace

std::string_view to_string(EventClass c) noexcept { return kNames[static_cast<std::size_t>(c)]; }

std::optional<EventClass> parse_event_class(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return static_cast<EventClass>(i);
    }
    return std::nullopt;
}

EventClass read_class(MemLevel level) noexcept {
    switch (level) {
        case MemLevel::RF: return EventClass::RfRead;
        case MemLevel::L1: return EventClass::L1Read;
        case MemLevel::L2: return EventClass::L2Read;
    }
    return EventClass::RfRead;
}

void EventLog::record_access(const AccessEvent& e) {
    accesses_.push_back(e);
    add(e.kind == AccessKind::Read ? read_class(e.level) : EventClass::Write);
}

void EventLog::merge(const EventLog& other) {
    for (std::size_t i = 0; i < kNumEventClasses; ++i) counts_[i] += other.counts_[i];
    accesses_.insert(accesses_.end(), other.accesses_.begin(), other.accesses_.end());
    ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
}

void EventLog::clear() noexcept {
    counts_ = {};
    accesses_.clear();
    ops_.clear();
}

}  // namespace abisim
