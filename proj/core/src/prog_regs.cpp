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

#include "abisim/prog_regs.hpp"

#include <cctype>
#include <string>

#include "abisim/errors.hpp"

namespace abisim {

namespace {

constexpr std::array<std::string_view, kNumStages> kStageNames{"st0", "st1", "st2", "st3",
                                                               "st4", "ca",  "s",   "th"};

constexpr std::array<std::string_view, 17> kFields{
    "sp_act",  "th_act",  "sm_act",  "nrf_m",   "bit_mode", "elem_mode",
    "bit_elser", "bit_wid", "sp_window", "dis_st0", "dis_st1", "dis_st2",
    "dis_st3", "dis_st4", "dis_ca",  "dis_s",   "dis_th"};

bool as_flag(std::string_view field, std::int64_t value) {
    if (value != 0 && value != 1) {
        throw RangeError(std::string(field) + " must be 0 or 1, got " + std::to_string(value));
    }
    return value == 1;
}

}  // namespace

std::string_view to_string(MemLevel level) noexcept {
    switch (level) {
        case MemLevel::RF: return "RF";
        case MemLevel::L1: return "L1";
        case MemLevel::L2: return "L2";
    }
    return "?";
}

std::string_view to_string(Stage stage) noexcept {
    return kStageNames[static_cast<std::size_t>(stage)];
}

std::optional<MemLevel> parse_level(std::string_view name) noexcept {
    if (name == "RF" || name == "rf") return MemLevel::RF;
    if (name == "L1" || name == "l1") return MemLevel::L1;
    if (name == "L2" || name == "l2") return MemLevel::L2;
    return std::nullopt;
}

std::optional<Stage> parse_stage(std::string_view name) noexcept {
    std::string lower(name);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (std::size_t i = 0; i < kStageNames.size(); ++i) {
        if (lower == kStageNames[i]) return static_cast<Stage>(i);
    }
    return std::nullopt;
}

ThMode ProgRegs::th_mode() const noexcept {
    if (dis_stage.contains(Stage::TH)) return ThMode::Bypass;
    if (sm_act) return ThMode::Softmax;
    if (th_act) return ThMode::Relu;
    return ThMode::Compare;
}

void ProgRegs::validate() const {
    if (bit_wid < kMinBitWid || bit_wid > kMaxBitWid) {
        throw RangeError("bit_wid must be in [1,16], got " + std::to_string(bit_wid));
    }
    if (sp_window < 1 || sp_window > kMaxWindow) {
        throw RangeError("sp_window must be in [1,65536], got " + std::to_string(sp_window));
    }
    if (bit_mode == BitMode::Parallel && !dis_stage.contains(Stage::St2)) {
        throw ConfigError("bit-parallel mode requires St2 disabled");
    }
    if (th_act && sm_act) {
        throw ConfigError("th_act and sm_act are mutually exclusive");
    }
}

ProgRegs set_prog_reg(const ProgRegs& regs, std::string_view field, std::int64_t value) {
    ProgRegs out = regs;
    if (field == "sp_act") {
        out.sp_act = as_flag(field, value);
    } else if (field == "th_act") {
        out.th_act = as_flag(field, value);
    } else if (field == "sm_act") {
        out.sm_act = as_flag(field, value);
    } else if (field == "nrf_m") {
        if (value < 0 || value > 2) throw RangeError("nrf_m must be 0, 1 or 2");
        out.nrf_m = static_cast<MemLevel>(value);
    } else if (field == "bit_mode") {
        out.bit_mode = as_flag(field, value) ? BitMode::Serial : BitMode::Parallel;
    } else if (field == "elem_mode") {
        out.elem_mode = as_flag(field, value) ? ElemMode::Serial : ElemMode::Parallel;
    } else if (field == "bit_elser") {
        if (value < 0 || value > 3) throw RangeError("bit_elser must be in [0,3]");
        out.bit_mode = (value & 2) ? BitMode::Serial : BitMode::Parallel;
        out.elem_mode = (value & 1) ? ElemMode::Serial : ElemMode::Parallel;
    } else if (field == "bit_wid") {
        if (value < ProgRegs::kMinBitWid || value > ProgRegs::kMaxBitWid) {
            throw RangeError("bit_wid must be in [1,16], got " + std::to_string(value));
        }
        out.bit_wid = static_cast<int>(value);
    } else if (field == "sp_window") {
        if (value < 1 || value > static_cast<std::int64_t>(ProgRegs::kMaxWindow)) {
            throw RangeError("sp_window must be in [1,65536], got " + std::to_string(value));
        }
        out.sp_window = static_cast<std::uint32_t>(value);
    } else if (field.starts_with("dis_")) {
        auto stage = parse_stage(field.substr(4));
        if (!stage) throw ConfigError("unknown stage in field " + std::string(field));
        if (as_flag(field, value)) {
            out.dis_stage.insert(*stage);
        } else {
            if (*stage == Stage::St2 && out.bit_mode == BitMode::Parallel) {
                throw ConfigError("St2 cannot be enabled in bit-parallel mode");
            }
            out.dis_stage.erase(*stage);
        }
    } else {
        throw ConfigError("unknown register field " + std::string(field));
    }

    if (field == "bit_mode" || field == "bit_elser") {
        if (out.bit_mode == BitMode::Parallel) {
            out.dis_stage.insert(Stage::St2);
        } else if (regs.bit_mode == BitMode::Parallel) {
            out.dis_stage.erase(Stage::St2);
        }
    }
    out.validate();
    return out;
}

std::int64_t get_prog_reg(const ProgRegs& regs, std::string_view field) {
    if (field == "sp_act") return regs.sp_act;
    if (field == "th_act") return regs.th_act;
    if (field == "sm_act") return regs.sm_act;
    if (field == "nrf_m") return static_cast<std::int64_t>(regs.nrf_m);
    if (field == "bit_mode") return regs.bit_mode == BitMode::Serial;
    if (field == "elem_mode") return regs.elem_mode == ElemMode::Serial;
    if (field == "bit_elser") {
        return (regs.bit_mode == BitMode::Serial ? 2 : 0) + (regs.elem_mode == ElemMode::Serial ? 1 : 0);
    }
    if (field == "bit_wid") return regs.bit_wid;
    if (field == "sp_window") return regs.sp_window;
    if (field.starts_with("dis_")) {
        if (auto stage = parse_stage(field.substr(4))) return regs.dis_stage.contains(*stage);
    }
    throw ConfigError("unknown register field " + std::string(field));
}

const std::array<std::string_view, 17>& prog_reg_fields() noexcept { return kFields; }

}  // namespace abisim
