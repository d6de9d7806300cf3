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

#include <cstddef>
#include <cstdint>

#include "abisim/prog_regs.hpp"

namespace abisim {

/// Per-op latency of the near-memory logic, in cycles.
struct LatencyModel {
    std::uint32_t nrf = 2;
    std::uint32_t nm_l1 = 4;
    std::uint32_t nm_l2 = 10;
    /// Register loads, REG'' loads, stores and PR writes issued to the NRF path.
    std::uint32_t aux = 1;

    [[nodiscard]] constexpr std::uint32_t level_base(MemLevel level) const noexcept {
        switch (level) {
            case MemLevel::RF: return nrf;
            case MemLevel::L1: return nm_l1;
            case MemLevel::L2: return nm_l2;
        }
        return nrf;
    }

    friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

/// Bit-plane groups serialized through the St2 register: ceil(bit_wid / 4).
[[nodiscard]] constexpr std::uint32_t bs_groups(int bit_wid) noexcept {
    return static_cast<std::uint32_t>((bit_wid + 3) / 4);
}

/// Fused VMAC latency: level base, plus (groups - 1) in bit-serial mode,
/// plus (banks - 1) in element-serial mode.
[[nodiscard]] constexpr std::uint32_t fused_latency(const LatencyModel& lat, MemLevel level, BitMode bit_mode,
                                                    ElemMode elem_mode, int bit_wid,
                                                    std::size_t banks) noexcept {
    std::uint32_t cycles = lat.level_base(level);
    if (bit_mode == BitMode::Serial) cycles += bs_groups(bit_wid) - 1;
    if (elem_mode == ElemMode::Serial && banks > 0) cycles += static_cast<std::uint32_t>(banks - 1);
    return cycles;
}

/// VRED has no bit-plane work, so only the element-serial penalty applies.
[[nodiscard]] constexpr std::uint32_t reduce_latency(const LatencyModel& lat, MemLevel level, ElemMode elem_mode,
                                                     std::size_t banks) noexcept {
    std::uint32_t cycles = lat.level_base(level);
    if (elem_mode == ElemMode::Serial && banks > 0) cycles += static_cast<std::uint32_t>(banks - 1);
    return cycles;
}

}  // namespace abisim
