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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "abisim/event_log.hpp"
#include "abisim/word.hpp"

namespace abisim {

/// Per-bank stage event counts for one fused access, before pricing.
struct BankStageEvents {
    std::uint64_t st0 = 0;
    std::uint64_t st1 = 0;
    std::uint64_t st2 = 0;
    std::uint64_t st3 = 0;
    std::uint64_t st4 = 0;

    friend bool operator==(const BankStageEvents&, const BankStageEvents&) = default;
};

/// Zero-operand detection per bank. A bank fires when its memory word or its
/// REG word is zero (whole-word test). Nothing fires and nothing is logged
/// while the detector is off; otherwise one sp_detect event per bank.
[[nodiscard]] std::vector<bool> detect(std::span<const Word> mem_words, std::span<const Word> reg,
                                       bool detector_on, EventLog* log = nullptr);

/// Clears the St1..St3 events of banks whose SpEn fired.
void gate_effect(const std::vector<bool>& sp_en, std::span<BankStageEvents> events);

/// Windowed monitor that shuts the detector down after a full window with no
/// sparsity events. One step is one fused-op issue.
struct SparsityMonitor {
    std::uint64_t sp_cnt = 0;
    std::uint32_t cycle_in_window = 0;
    std::uint32_t window = 512;
    bool detector_on = false;
    bool sp_en_last = false;
    std::uint64_t windows_elapsed = 0;
    std::uint64_t steps = 0;
    std::optional<std::uint64_t> shutdown_cycle;

    /// Fresh monitor armed (or not) with the given window.
    [[nodiscard]] static SparsityMonitor armed(std::uint32_t window, bool on);

    [[nodiscard]] bool valid() const noexcept {
        return sp_cnt <= cycle_in_window && cycle_in_window <= window && window >= 1;
    }

    friend bool operator==(const SparsityMonitor&, const SparsityMonitor&) = default;
};

/// Advances the monitor by one access cycle. Counts the event
/// (sp_cnt + 1 or sp_cnt), and at the window boundary either shuts the
/// detector down (no events seen) or simply restarts the window.
[[nodiscard]] SparsityMonitor monitor_step(const SparsityMonitor& m, bool any_sp_en);

[[nodiscard]] nlohmann::json to_json(const SparsityMonitor& m);

}  // namespace abisim
