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

#include "abisim/rce.hpp"

#include <algorithm>

#include <cstdlib>
#include <limits>
#include <string>

#include "abisim/errors.hpp"

namespace abisim {

namespace {

constexpr std::int64_t kAccMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kAccMax = std::numeric_limits<std::int32_t>::max();

// Magnitude of a word and whether it fits in bit_wid magnitude bits.
std::uint32_t magnitude_checked(const Word& w, int bit_wid, const char* side) {
    const auto v = static_cast<std::int64_t>(w.value());
    const auto mag = static_cast<std::uint64_t>(v < 0 ? -v : v);
    if (mag >= (std::uint64_t{1} << bit_wid)) {
        throw ResolutionError(std::string(side) + " operand " + std::to_string(v) + " exceeds " +
                              std::to_string(bit_wid) + "-bit resolution");
    }
    return static_cast<std::uint32_t>(mag);
}

int sign_of(std::int32_t v) noexcept { return v < 0 ? -1 : 1; }

void add(EventCounts& counts, EventClass c, std::uint64_t n) { counts[static_cast<std::size_t>(c)] += n; }

void check_datapath(const ProgRegs& pr) {
    pr.validate();
    if (!pr.enabled(Stage::CA)) throw ConfigError("central adder cannot be disabled for a fused op");
    if (!pr.enabled(Stage::St1) && pr.bit_wid > 1) {
        throw ConfigError("St1 may only be disabled for 1-bit compute");
    }
    if (pr.bit_mode == BitMode::Serial && !pr.enabled(Stage::St2)) {
        throw ConfigError("bit-serial mode needs the St2 register");
    }
}

}  // namespace

std::int64_t checked_acc(std::int64_t v, const char* where) {
    if (v < kAccMin || v > kAccMax) {
        throw OverflowError(std::string(where) + ": 32-bit accumulator overflow (" + std::to_string(v) + ")");
    }
    return v;
}

PartialProductPlane st0_partials(std::span<const Word> mem_words, std::span<const Word> reg, int bit_wid) {
    if (bit_wid < 1 || bit_wid > ProgRegs::kMaxBitWid) throw RangeError("bit_wid out of range");
    if (mem_words.size() != reg.size()) throw ConfigError("St0: memory row and REG lengths differ");
    PartialProductPlane plane;
    plane.bit_wid = bit_wid;
    plane.banks.reserve(mem_words.size());
    for (std::size_t b = 0; b < mem_words.size(); ++b) {
        const auto m = magnitude_checked(mem_words[b], bit_wid, "memory");
        const auto r = magnitude_checked(reg[b], bit_wid, "REG");
        BankPlane bp;
        bp.dim = bit_wid;
        bp.bits.resize(static_cast<std::size_t>(bit_wid * bit_wid));
        for (int k = 0; k < bit_wid; ++k) {
            for (int l = 0; l < bit_wid; ++l) {
                bp.bits[static_cast<std::size_t>(k * bit_wid + l)] =
                    static_cast<std::uint8_t>(((m >> k) & 1u) & ((r >> l) & 1u));
            }
        }
        bp.sign = sign_of(mem_words[b].value()) * sign_of(reg[b].value());
        plane.banks.push_back(std::move(bp));
    }
    return plane;
}

std::vector<ShiftedBank> st1_shift(const PartialProductPlane& plane, int bit_wid) {
    std::vector<ShiftedBank> out;
    out.reserve(plane.banks.size());
    for (const auto& bp : plane.banks) {
        ShiftedBank sb;
        sb.sign = bp.sign;
        const int live = std::min(bp.dim, bit_wid);
        sb.rows.assign(static_cast<std::size_t>(bp.dim), 0);
        for (int k = 0; k < live; ++k) {
            std::int64_t row = 0;
            for (int l = 0; l < live; ++l) {
                if (bp.at(k, l)) row += std::int64_t{1} << (k + l);
            }
            sb.rows[static_cast<std::size_t>(k)] = row;
        }
        out.push_back(std::move(sb));
    }
    return out;
}

AccumulateResult st2_st3_accumulate(std::span<const ShiftedBank> shifted, BitMode mode, StageSet dis_stage) {
    AccumulateResult res;
    res.per_bank.assign(shifted.size(), 0);
    const bool st3_on = !dis_stage.contains(Stage::St3);
    std::size_t rows = 0;
    for (const auto& sb : shifted) rows = std::max(rows, sb.rows.size());
    const auto groups = static_cast<std::uint32_t>((rows + 3) / 4);

    if (mode == BitMode::Serial) {
        if (dis_stage.contains(Stage::St2)) throw ConfigError("bit-serial mode needs the St2 register");
        res.cycles = std::max<std::uint32_t>(groups, 1);
        for (std::size_t b = 0; b < shifted.size(); ++b) {
            std::int64_t st3 = 0;
            for (std::uint32_t g = 0; g < groups; ++g) {
                std::int64_t st2 = 0;
                for (std::size_t k = g * 4u; k < std::min<std::size_t>(shifted[b].rows.size(), g * 4u + 4u); ++k) {
                    st2 += shifted[b].rows[k];
                }
                st3 += st2;
            }
            res.per_bank[b] = st3_on ? checked_acc(shifted[b].sign * st3, "St3") : 0;
        }
    } else {
        res.cycles = 1;
        for (std::size_t b = 0; b < shifted.size(); ++b) {
            std::int64_t st3 = 0;
            for (auto row : shifted[b].rows) st3 += row;
            res.per_bank[b] = st3_on ? checked_acc(shifted[b].sign * st3, "St3") : 0;
        }
    }
    return res;
}

std::vector<std::int64_t> st4_multiply(std::span<const std::int64_t> per_bank, const std::optional<Word>& reg2,
                                       StageSet dis_stage) {
    std::vector<std::int64_t> out(per_bank.begin(), per_bank.end());
    if (dis_stage.contains(Stage::St4)) return out;
    if (!reg2) throw ConfigError("St4 enabled but REG'' is unset");
    for (auto& v : out) v = checked_acc(v * reg2->value(), "St4");
    return out;
}

CaResult central_add(std::span<const std::int64_t> per_bank, ElemMode mode, std::int64_t acc_in, bool subtract) {
    CaResult res;
    std::int64_t sum = 0;
    // Element-serial: one bank per cycle with the rest forced to zero. The
    // sum is the same; only the cycle count differs.
    for (auto v : per_bank) sum = checked_acc(sum + v, "CA");
    res.raw_sum = checked_acc(subtract ? acc_in - sum : acc_in + sum, "CA");
    res.cycles = mode == ElemMode::Serial ? static_cast<std::uint32_t>(per_bank.size()) : 1u;
    return res;
}

std::int64_t scale(std::int64_t raw_sum, const std::optional<Word>& reg2, bool enabled) {
    if (!enabled) return raw_sum;
    if (!reg2) throw ConfigError("scaler enabled but REG'' is unset");
    const std::int64_t d = reg2->value();
    if (d == 0) throw DivideByZeroError("scaler divisor REG'' is zero");
    return raw_sum / d;  // C++ division truncates toward zero
}

ThResult threshold(std::int64_t scaled, ThMode mode, std::int64_t compare_ref) {
    switch (mode) {
        case ThMode::Relu: return {scaled > 0 ? scaled : 0, 0};
        case ThMode::Compare:
            return {scaled >= compare_ref ? 1 : -1, std::llabs(scaled - compare_ref)};
        case ThMode::Softmax:
        case ThMode::Bypass: break;
    }
    return {scaled, 0};
}

BankStageEvents stage_events(const ProgRegs& pr) {
    const auto bw = static_cast<std::uint64_t>(pr.bit_wid);
    const auto groups = static_cast<std::uint64_t>(bs_groups(pr.bit_wid));
    BankStageEvents ev;
    if (pr.enabled(Stage::St0)) ev.st0 = bw * bw;
    if (pr.enabled(Stage::St1)) ev.st1 = bw * bw;
    if (pr.bit_mode == BitMode::Serial) {
        // One St2 accumulate per bit-plane row; St3 folds each group.
        if (pr.enabled(Stage::St2)) ev.st2 = bw;
        if (pr.enabled(Stage::St3)) ev.st3 = groups;
    } else {
        // The combinational tree has 16 lanes (a 4x4 group) per group.
        if (pr.enabled(Stage::St3)) ev.st3 = 16 * groups;
    }
    if (pr.enabled(Stage::St4)) ev.st4 = 1;
    return ev;
}

RceResult execute_fused(const BankedMemory& mem, std::size_t word_index, const OperandRegs& regs,
                        const ProgRegs& pr, SparsityMonitor& monitor, EventLog& log, const FusedOptions& opt,
                        const LatencyModel& lat) {
    check_datapath(pr);
    if (regs.reg.size() != mem.banks()) throw ConfigError("REG length must equal the bank count");

    RceResult res;
    const auto row = mem.read(word_index, log);
    add(res.events, read_class(mem.level()), 1);

    const bool detector_on = pr.sp_act && monitor.detector_on;
    res.sp_en = detect(row, regs.reg, detector_on, nullptr);
    if (detector_on) {
        add(res.events, EventClass::SpDetect, row.size());
        bool any = false;
        for (bool f : res.sp_en) any = any || f;
        monitor = monitor_step(monitor, any);
    }

    const std::size_t banks = row.size();
    std::vector<std::int64_t> per_bank(banks, 0);
    if (pr.enabled(Stage::St0)) {
        const auto plane = st0_partials(row, regs.reg, pr.bit_wid);
        const auto shifted = st1_shift(plane, pr.bit_wid);
        auto acc = st2_st3_accumulate(shifted, pr.bit_mode, pr.dis_stage);
        per_bank = std::move(acc.per_bank);
    }
    for (std::size_t b = 0; b < banks; ++b) {
        if (res.sp_en[b]) per_bank[b] = 0;  // exact: one operand is zero
    }
    per_bank = st4_multiply(per_bank, regs.reg2, pr.dis_stage);
    res.per_bank = per_bank;

    std::vector<BankStageEvents> bank_events(banks, stage_events(pr));
    gate_effect(res.sp_en, bank_events);
    for (const auto& ev : bank_events) {
        add(res.events, EventClass::St0And, ev.st0);
        add(res.events, EventClass::St1Shift, ev.st1);
        add(res.events, EventClass::St2Add, ev.st2);
        add(res.events, EventClass::St3Add, ev.st3);
        add(res.events, EventClass::St4Mul, ev.st4);
    }

    const auto ca = central_add(per_bank, pr.elem_mode, opt.acc_in, opt.subtract);
    add(res.events, EventClass::CaAdd, banks);
    res.raw_sum = ca.raw_sum;

    if (opt.partial) {
        res.scaled = res.raw_sum;
        res.th_out = res.raw_sum;
    } else {
        const bool s_on = pr.enabled(Stage::S);
        res.scaled = scale(res.raw_sum, regs.reg2, s_on);
        if (s_on) add(res.events, EventClass::ScaleDiv, 1);
        const auto mode = pr.th_mode();
        const auto th = threshold(res.scaled, mode, opt.compare_ref);
        res.th_out = th.out;
        res.l1 = th.l1;
        if (mode == ThMode::Relu || mode == ThMode::Compare) add(res.events, EventClass::ThCmp, 1);
    }

    res.cycles = fused_latency(lat, mem.level(), pr.bit_mode, pr.elem_mode, pr.bit_wid, banks);
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        const auto c = static_cast<EventClass>(i);
        if (c == read_class(mem.level())) continue;  // logged by the read itself
        log.add(c, res.events[i]);
    }
    return res;
}

RceResult execute_reduce(const BankedMemory& mem, std::size_t word_index, const OperandRegs& regs,
                         const ProgRegs& pr, EventLog& log, const FusedOptions& opt, const LatencyModel& lat) {
    pr.validate();
    if (!pr.enabled(Stage::CA)) throw ConfigError("central adder cannot be disabled for a reduce op");
    RceResult res;
    const auto row = mem.read(word_index, log);
    add(res.events, read_class(mem.level()), 1);
    res.per_bank.reserve(row.size());
    for (const auto& w : row) res.per_bank.push_back(w.value());
    res.sp_en.assign(row.size(), false);

    const auto ca = central_add(res.per_bank, pr.elem_mode, opt.acc_in, opt.subtract);
    add(res.events, EventClass::CaAdd, row.size());
    res.raw_sum = ca.raw_sum;
    if (opt.partial) {
        res.scaled = res.th_out = res.raw_sum;
    } else {
        const bool s_on = pr.enabled(Stage::S);
        res.scaled = scale(res.raw_sum, regs.reg2, s_on);
        if (s_on) add(res.events, EventClass::ScaleDiv, 1);
        const auto mode = pr.th_mode();
        const auto th = threshold(res.scaled, mode, opt.compare_ref);
        res.th_out = th.out;
        res.l1 = th.l1;
        if (mode == ThMode::Relu || mode == ThMode::Compare) add(res.events, EventClass::ThCmp, 1);
    }
    res.cycles = reduce_latency(lat, mem.level(), pr.elem_mode, row.size());
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        const auto c = static_cast<EventClass>(i);
        if (c == read_class(mem.level())) continue;
        log.add(c, res.events[i]);
    }
    return res;
}

}  // namespace abisim
