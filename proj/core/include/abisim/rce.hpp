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

#include "abisim/banked_memory.hpp"
#include "abisim/event_log.hpp"
#include "abisim/latency.hpp"
#include "abisim/prog_regs.hpp"
#include "abisim/sparsity.hpp"
#include "abisim/word.hpp"

namespace abisim {

/// AND-plane of one bank: p[k][l] = bit_k(|mem|) & bit_l(|reg|), k,l < dim.
/// The sign of mem*reg is split off before the plane is formed.
struct BankPlane {
    int dim = 0;
    std::vector<std::uint8_t> bits;  // row-major, dim*dim
    int sign = 1;

    [[nodiscard]] std::uint8_t at(int k, int l) const { return bits[static_cast<std::size_t>(k * dim + l)]; }
};

struct PartialProductPlane {
    int bit_wid = 0;
    std::vector<BankPlane> banks;
};

/// St1 output for one bank: row k holds sum_l p[k][l] * 2^(k+l).
struct ShiftedBank {
    std::vector<std::int64_t> rows;
    int sign = 1;
};

struct AccumulateResult {
    std::vector<std::int64_t> per_bank;
    std::uint32_t cycles = 0;
};

struct CaResult {
    std::int64_t raw_sum = 0;
    std::uint32_t cycles = 0;
};

struct ThResult {
    std::int64_t out = 0;
    /// |scaled - ref| in compare mode, else 0.
    std::int64_t l1 = 0;
};

/// Inputs of one fused op beyond the memory row and operand registers.
struct FusedOptions {
    /// Central-adder seed: b_i for Jacobi, or a previous tile's partial sum.
    std::int64_t acc_in = 0;
    /// CA computes acc_in - sum instead of acc_in + sum.
    bool subtract = false;
    /// Stop after CA (an intermediate tile); scaler and threshold are skipped.
    bool partial = false;
    std::int64_t compare_ref = 0;
    bool chained = false;
    bool with_bias = false;
    /// Instruction-level TH function for this op only (the PRs are unchanged).
    std::optional<ThMode> th_override;
};

struct RceResult {
    std::int64_t raw_sum = 0;
    std::int64_t scaled = 0;
    std::int64_t th_out = 0;
    std::int64_t l1 = 0;
    std::uint32_t cycles = 0;
    std::vector<std::int64_t> per_bank;
    std::vector<bool> sp_en;
    /// Events this op contributed, by class.
    EventCounts events{};
};

/// 32-bit accumulator range check; OverflowError when `v` does not fit.
std::int64_t checked_acc(std::int64_t v, const char* where);

// --- stages -------------------------------------------------------------

[[nodiscard]] PartialProductPlane st0_partials(std::span<const Word> mem_words, std::span<const Word> reg,
                                               int bit_wid);

/// Weights every partial by 2^(k+l). Plane rows or columns at index
/// >= bit_wid are masked, so a plane formed at a wider width contributes only
/// its low bit_wid x bit_wid corner.
[[nodiscard]] std::vector<ShiftedBank> st1_shift(const PartialProductPlane& plane, int bit_wid);

/// St2/St3. Bit-serial: St2 accumulates one group of four bit-plane rows per
/// cycle and St3 adds each group result. Bit-parallel: St2 is bypassed and St3
/// sums every row in one cycle. The sign is applied at St3 exit. A disabled St3
/// forces every bank to zero.
[[nodiscard]] AccumulateResult st2_st3_accumulate(std::span<const ShiftedBank> shifted, BitMode mode,
                                                  StageSet dis_stage);

[[nodiscard]] std::vector<std::int64_t> st4_multiply(std::span<const std::int64_t> per_bank,
                                                     const std::optional<Word>& reg2, StageSet dis_stage);

[[nodiscard]] CaResult central_add(std::span<const std::int64_t> per_bank, ElemMode mode,
                                   std::int64_t acc_in = 0, bool subtract = false);

/// Division by REG'' truncating toward zero ("scaling by v" divides by v).
[[nodiscard]] std::int64_t scale(std::int64_t raw_sum, const std::optional<Word>& reg2, bool enabled);

/// ReLU / compare (ties resolve to +1) / bypass. Softmax passes the value
/// through; the LWSM buffer consumes it.
[[nodiscard]] ThResult threshold(std::int64_t scaled, ThMode mode, std::int64_t compare_ref);

/// Per-bank stage events of one access before sparsity gating.
[[nodiscard]] BankStageEvents stage_events(const ProgRegs& pr);

/// Runs one fused load-MAC-reduce-threshold op:
/// read -> detect -> St0..St4 -> CA -> S -> TH.
/// Banks whose SpEn fires have St1..St3 gated (no events, zero product).
/// Steps `monitor` when the detector is on.
[[nodiscard]] RceResult execute_fused(const BankedMemory& mem, std::size_t word_index, const OperandRegs& regs,
                                      const ProgRegs& pr, SparsityMonitor& monitor, EventLog& log,
                                      const FusedOptions& opt = {}, const LatencyModel& lat = {});

/// Reduce-only op: CA over the memory row, then S and TH as configured.
[[nodiscard]] RceResult execute_reduce(const BankedMemory& mem, std::size_t word_index, const OperandRegs& regs,
                                       const ProgRegs& pr, EventLog& log, const FusedOptions& opt = {},
                                       const LatencyModel& lat = {});

}  // namespace abisim
