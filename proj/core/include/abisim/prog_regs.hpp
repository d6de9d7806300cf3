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
#include <string>
#include <string_view>

namespace abisim {

enum class MemLevel : std::uint8_t { RF = 0, L1 = 1, L2 = 2 };
inline constexpr std::size_t kNumLevels = 3;

enum class BitMode : std::uint8_t { Parallel = 0, Serial = 1 };
enum class ElemMode : std::uint8_t { Parallel = 0, Serial = 1 };

/// Gateable blocks of the near-memory datapath. St0..St4 are the RCE stages;
/// CA, S and TH are the central adder, scaler and thresholding block.
enum class Stage : std::uint8_t { St0 = 0, St1, St2, St3, St4, CA, S, TH };
inline constexpr std::size_t kNumStages = 8;

[[nodiscard]] std::string_view to_string(MemLevel level) noexcept;
[[nodiscard]] std::string_view to_string(Stage stage) noexcept;
[[nodiscard]] std::optional<MemLevel> parse_level(std::string_view name) noexcept;
[[nodiscard]] std::optional<Stage> parse_stage(std::string_view name) noexcept;

class StageSet {
public:
    constexpr StageSet() = default;
    constexpr StageSet(std::initializer_list<Stage> stages) {
        for (Stage s : stages) insert(s);
    }

    constexpr void insert(Stage s) noexcept { bits_ |= bit(s); }
    constexpr void erase(Stage s) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(s)); }
    [[nodiscard]] constexpr bool contains(Stage s) const noexcept { return (bits_ & bit(s)) != 0; }
    [[nodiscard]] constexpr std::uint8_t bits() const noexcept { return bits_; }

    friend constexpr bool operator==(StageSet, StageSet) = default;

private:
    static constexpr std::uint8_t bit(Stage s) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
    }
    std::uint8_t bits_ = 0;
};

/// Thresholding block function implied by (TH disable, th_act, sm_act).
enum class ThMode : std::uint8_t { Bypass, Relu, Compare, Softmax };

/// The programmable configuration registers of the near-memory logic.
///
/// Defaults describe a plain multiply-reduce: bit- and element-parallel,
/// INT8, St2 bypassed, St4/scaler/threshold gated off, sparsity detection off.
struct ProgRegs {
    bool sp_act = false;
    bool th_act = false;
    bool sm_act = false;
    MemLevel nrf_m = MemLevel::RF;
    BitMode bit_mode = BitMode::Parallel;
    ElemMode elem_mode = ElemMode::Parallel;
    int bit_wid = 8;
    StageSet dis_stage{Stage::St2, Stage::St4, Stage::S, Stage::TH};
    std::uint32_t sp_window = 512;

    static constexpr int kMinBitWid = 1;
    static constexpr int kMaxBitWid = 16;
    static constexpr std::uint32_t kMaxWindow = 1u << 16;

    [[nodiscard]] bool enabled(Stage s) const noexcept { return !dis_stage.contains(s); }
    [[nodiscard]] ThMode th_mode() const noexcept;

    /// Throws ConfigError or RangeError if any register invariant is broken.
    void validate() const;

    friend bool operator==(const ProgRegs&, const ProgRegs&) = default;
};

/// Writes one named register field and re-establishes derived constraints.
///
/// Field names: sp_act, th_act, sm_act, nrf_m (0=RF 1=L1 2=L2), bit_mode
/// (0=BP 1=BS), elem_mode (0=EP 1=ES), bit_elser (bit1=BS, bit0=ES),
/// bit_wid, sp_window, and dis_<stage> for every stage name
/// (st0..st4, ca, s, th). Selecting bit-parallel forces St2 disabled;
/// selecting bit-serial re-enables it, since the St2 register is the serializer.
[[nodiscard]] ProgRegs set_prog_reg(const ProgRegs& regs, std::string_view field, std::int64_t value);

/// Reads a field back using the same names and encodings as set_prog_reg.
[[nodiscard]] std::int64_t get_prog_reg(const ProgRegs& regs, std::string_view field);

/// Every field name accepted by set_prog_reg, in canonical order.
[[nodiscard]] const std::array<std::string_view, 17>& prog_reg_fields() noexcept;

}  // namespace abisim
