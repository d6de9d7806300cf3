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

#include "abisim/sparsity.hpp"

#include <algorithm>

#include "abisim/errors.hpp"

namespace abisim {

std::vector<bool> detect(std::span<const Word> mem_words, std::span<const Word> reg, bool detector_on,
                         EventLog* log) {
    if (mem_words.size() != reg.size()) {
        throw ConfigError("sparsity detect: memory row and REG lengths differ");
    }
    std::vector<bool> sp_en(mem_words.size(), false);
    if (!detector_on) return sp_en;
    for (std::size_t b = 0; b < mem_words.size(); ++b) {
        sp_en[b] = mem_words[b].value() == 0 || reg[b].value() == 0;
    }
    if (log != nullptr) log->add(EventClass::SpDetect, mem_words.size());
    return sp_en;
}

void gate_effect(const std::vector<bool>& sp_en, std::span<BankStageEvents> events) {
    const auto n = std::min(sp_en.size(), events.size());
    for (std::size_t b = 0; b < n; ++b) {
        if (!sp_en[b]) continue;
        events[b].st1 = 0;
        events[b].st2 = 0;
        events[b].st3 = 0;
    }
}

SparsityMonitor SparsityMonitor::armed(std::uint32_t window, bool on) {
    SparsityMonitor m;
    m.window = window;
    m.detector_on = on;
    return m;
}

SparsityMonitor monitor_step(const SparsityMonitor& m, bool any_sp_en) {
    SparsityMonitor next = m;
    if (!next.detector_on) return next;
    ++next.steps;
    next.sp_en_last = any_sp_en;
    next.sp_cnt = any_sp_en ? m.sp_cnt + 1 : m.sp_cnt;
    ++next.cycle_in_window;
    if (next.cycle_in_window >= next.window) {
        ++next.windows_elapsed;
        if (next.sp_cnt == 0) {
            next.detector_on = false;
            next.shutdown_cycle = next.steps;
        }
        next.sp_cnt = 0;
        next.cycle_in_window = 0;
    }
    return next;
}

nlohmann::json to_json(const SparsityMonitor& m) {
    return nlohmann::json{{"sp_cnt", m.sp_cnt},
                          {"detector_on", m.detector_on},
                          {"windows_elapsed", m.windows_elapsed},
                          {"shutdown_cycle", m.shutdown_cycle ? nlohmann::json(*m.shutdown_cycle)
                                                              : nlohmann::json(nullptr)}};
}

}  // namespace abisim
