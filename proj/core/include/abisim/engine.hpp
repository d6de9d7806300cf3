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
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "abisim/banked_memory.hpp"
#include "abisim/engine_config.hpp"
#include "abisim/event_log.hpp"
#include "abisim/latency.hpp"
#include "abisim/lwsm.hpp"
#include "abisim/rce.hpp"
#include "abisim/sparsity.hpp"

namespace abisim {

/// Where a STOUT writes its value besides the output stream.
struct StoreTarget {
    MemLevel level = MemLevel::RF;
    std::size_t bank = 0;
    std::size_t addr = 0;
};

/// One near-memory compute instance: register file of programmable
/// registers, RF/L1/L2 banked arrays, operand registers, sparsity monitor,
/// the result accumulator, and the event log of the current run.
///
/// Each method corresponds to one instruction and appends one trace record.
class Engine {
public:
    explicit Engine(EngineConfig cfg = {}, LatencyModel lat = {});

    [[nodiscard]] const EngineConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const ProgRegs& regs() const noexcept { return pr_; }
    [[nodiscard]] std::size_t banks() const noexcept { return cfg_.banks; }
    [[nodiscard]] const BankedMemory& memory(MemLevel level) const { return mems_[static_cast<std::size_t>(level)]; }
    [[nodiscard]] const OperandRegs& operands() const noexcept { return ops_; }
    [[nodiscard]] const SparsityMonitor& monitor() const noexcept { return monitor_; }
    [[nodiscard]] const EventLog& log() const noexcept { return log_; }
    [[nodiscard]] const EventLog& setup_log() const noexcept { return setup_log_; }
    [[nodiscard]] const std::vector<std::int64_t>& outputs() const noexcept { return outputs_; }
    [[nodiscard]] std::optional<std::int64_t> accumulator() const noexcept { return acc_; }
    [[nodiscard]] const std::optional<RceResult>& last_result() const noexcept { return last_; }
    [[nodiscard]] const std::optional<LwsmResult>& last_lwsm() const noexcept { return last_lwsm_; }
    [[nodiscard]] std::size_t instructions_issued() const noexcept { return log_.ops().size(); }
    [[nodiscard]] int lwsm_frac_bits() const noexcept { return frac_bits_; }
    void set_lwsm_frac_bits(int frac_bits);

    /// PRSET. Writing sp_act or sp_window re-arms the sparsity monitor.
    void prset(std::string_view field, std::int64_t value);
    /// LDM: stationary data placed before the kernel. Logged to the setup log.
    void preload(MemLevel level, std::size_t bank, std::size_t addr, Word w);
    /// Preloads a whole row (one word per bank, missing banks zero).
    void preload_row(MemLevel level, std::size_t addr, std::span<const Word> row);
    /// LDR of a single REG bank.
    void load_reg(std::size_t bank, Word w);
    /// LDR of the whole REG vector (missing banks zero).
    void load_reg_vector(std::span<const Word> values);
    /// LDR2: REG''.
    void load_reg2(Word w);

    /// VMACRT at the current memory level. With `chain`, the accumulator
    /// seeds the CA. SM_ACT pushes the scaled value into the softmax buffer.
    const RceResult& vmacrt(std::size_t addr, FusedOptions opt = {});
    /// VRED at the current memory level.
    const RceResult& vred(std::size_t addr, FusedOptions opt = {});
    /// STOUT: appends the last threshold output to the output stream and
    /// optionally writes it back to memory.
    std::int64_t stout(std::optional<StoreTarget> target = std::nullopt);
    /// STOUT that drains the softmax buffer: normalises the buffered scores,
    /// runs LWSM and appends the Q0.frac probabilities to the output stream.
    const LwsmResult& stout_lwsm();

    /// Outputs, accumulator and softmax buffer are cleared; memory, registers
    /// and the event log are kept.
    void clear_outputs() noexcept;
    /// Starts a fresh event log (memory and registers kept).
    void reset_log() noexcept;

    [[nodiscard]] nlohmann::json snapshot() const;

private:
    BankedMemory& mem(MemLevel level) { return mems_[static_cast<std::size_t>(level)]; }
    void rearm_monitor();

    EngineConfig cfg_;
    LatencyModel lat_;
    ProgRegs pr_;
    std::vector<BankedMemory> mems_;
    OperandRegs ops_;
    SparsityMonitor monitor_;
    EventLog log_;
    EventLog setup_log_;
    std::optional<std::int64_t> acc_;
    std::optional<RceResult> last_;
    std::optional<LwsmResult> last_lwsm_;
    std::vector<std::int64_t> sm_buffer_;
    std::vector<std::int64_t> outputs_;
    int frac_bits_ = 8;
};

}  // namespace abisim
