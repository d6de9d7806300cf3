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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "abisim/prog_regs.hpp"

namespace abisim {

/// Priced event classes. Names (see `to_string`) are the keys of the
/// energy table in calibration files.
enum class EventClass : std::uint8_t {
    RfRead,
    L1Read,
    L2Read,
    Write,
    St0And,
    St1Shift,
    St2Add,
    St3Add,
    St4Mul,
    CaAdd,
    ScaleDiv,
    ThCmp,
    LwsmOp,
    SpDetect,
    BaseInstrFetchDecode,
    BaseAluMac,
    BaseRfAccess,
    Count_
};
inline constexpr std::size_t kNumEventClasses = static_cast<std::size_t>(EventClass::Count_);

[[nodiscard]] std::string_view to_string(EventClass c) noexcept;
[[nodiscard]] std::optional<EventClass> parse_event_class(std::string_view name) noexcept;
[[nodiscard]] EventClass read_class(MemLevel level) noexcept;

using EventCounts = std::array<std::uint64_t, kNumEventClasses>;

enum class AccessKind : std::uint8_t { Read, Write };

/// One memory-array access (a broadcast row read or a single-word write).
struct AccessEvent {
    AccessKind kind;
    MemLevel level;
    std::uint32_t bank;  // 0 for row reads
    std::uint32_t index;
};

/// Instruction-level trace entry; the cost model derives latency from these.
enum class OpKind : std::uint8_t {
    ProgSet,   // PRSET
    Preload,   // LDM: stationary data placed before the kernel, untimed
    LoadReg,   // LDR
    LoadReg2,  // LDR2
    Fused,     // VMACRT
    Reduce,    // VRED
    Store,     // STOUT
    LwsmFlush  // STOUT that drains the softmax buffer
};

struct OpRecord {
    OpKind kind = OpKind::Fused;
    MemLevel level = MemLevel::RF;
    BitMode bit_mode = BitMode::Parallel;
    ElemMode elem_mode = ElemMode::Parallel;
    std::uint8_t bit_wid = 8;
    std::uint16_t banks = 0;       // banks feeding the central adder
    bool scaler = false;           // S enabled for this op
    ThMode th = ThMode::Bypass;    // TH function applied
    bool partial = false;          // result kept in the accumulator, S/TH skipped
    bool chained = false;          // accumulator input taken from a previous op
    bool with_bias = false;        // CA seeded with an immediate (e.g. b_i)
    std::uint32_t elements = 0;    // LwsmFlush vector length

    friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

/// Run-wide record of everything the cost model prices: per-class event
/// counts, the ordered memory access log, and the instruction trace.
class EventLog {
public:
    void add(EventClass c, std::uint64_t n = 1) noexcept { counts_[static_cast<std::size_t>(c)] += n; }
    void record_access(const AccessEvent& e);
    void record_op(const OpRecord& op) { ops_.push_back(op); }

    [[nodiscard]] std::uint64_t count(EventClass c) const noexcept {
        return counts_[static_cast<std::size_t>(c)];
    }
    [[nodiscard]] const EventCounts& counts() const noexcept { return counts_; }
    [[nodiscard]] const std::vector<AccessEvent>& accesses() const noexcept { return accesses_; }
    [[nodiscard]] const std::vector<OpRecord>& ops() const noexcept { return ops_; }

    /// Appends another log (counts add, sequences concatenate).
    void merge(const EventLog& other);
    void clear() noexcept;

private:
    EventCounts counts_{};
    std::vector<AccessEvent> accesses_;
    std::vector<OpRecord> ops_;
};

}  // namespace abisim
