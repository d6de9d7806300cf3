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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "abisim/event_log.hpp"
#include "abisim/latency.hpp"
#include "abisim/prog_regs.hpp"

namespace abisim {

/// Instruction-expansion parameters of the baseline GPU model. Each fused op
/// becomes: one load, one vector MAC, (banks - 1) reduction adds, one add
/// per accumulator seed, the scaler divide, and one threshold-or-move.
struct BaselineParams {
    /// Average cycles per baseline instruction.
    double instr_latency = 4.0;
    /// Extra load latency when the operand lives in L1 / L2.
    std::array<double, kNumLevels> load_extra{0.0, 0.0, 0.0};
    std::uint32_t div_instrs = 1;
    std::uint32_t softmax_instrs_per_elem = 6;

    friend bool operator==(const BaselineParams&, const BaselineParams&) = default;
};

/// Per-event energy prices (arbitrary units), the near-memory latency model,
/// and the baseline expansion parameters.
struct CostTable {
    std::array<double, kNumEventClasses> energy{};
    LatencyModel latency;
    BaselineParams baseline;

    [[nodiscard]] double price(EventClass c) const noexcept { return energy[static_cast<std::size_t>(c)]; }
    void set_price(EventClass c, double v) noexcept { energy[static_cast<std::size_t>(c)] = v; }
    /// SchemaError on negative prices or zero latencies.
    void validate() const;
    /// Uniform unit prices; useful for tests that only count events.
    [[nodiscard]] static CostTable unit();

    friend bool operator==(const CostTable&, const CostTable&) = default;
};

/// The shipped calibration (identical to data/calibration.json).
[[nodiscard]] CostTable default_cost_table();

/// Strict parse of {"energy": {class: price}, "latency": {...}, "baseline": {...}}.
/// Every energy class must be present; unknown keys raise SchemaError.
[[nodiscard]] CostTable cost_table_from_json(const nlohmann::json& doc);
[[nodiscard]] CostTable load_cost_table(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const CostTable& table);

/// Event counts keyed by class name; unknown names raise SchemaError.
[[nodiscard]] EventCounts event_counts_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json event_counts_to_json(const EventCounts& counts);

/// Aggregated accounting of one run.
struct RunReport {
    std::string workload;
    std::string variant;  // "abi", "base", "base_plus_abi"
    std::uint64_t seed = 0;
    double cycles = 0.0;
    double energy = 0.0;
    /// 8-bit-equivalent MAC operations.
    double ops = 0.0;
    std::uint64_t instructions = 0;
    /// Event totals; fractional for base_plus_abi, where work is split.
    std::array<double, kNumEventClasses> events{};
    /// Fraction of fused work routed to the ALUs (base_plus_abi only).
    std::optional<double> alu_share;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json extra = nlohmann::json::object();

    [[nodiscard]] double ops_per_energy() const noexcept { return energy > 0.0 ? ops / energy : 0.0; }
};

/// 8-bit-equivalent ops in a trace: banks * 8 / bit_wid per fused op.
[[nodiscard]] double count_ops(const EventLog& log);

/// Prices an ABI run: energy from the event counts, cycles from the trace.
[[nodiscard]] RunReport account(const EventLog& log, const ProgRegs& pr, const CostTable& table);
/// Linear pricing of raw counts.
[[nodiscard]] double price_events(const EventCounts& counts, const CostTable& table);

/// Baseline instruction count of one trace entry.
[[nodiscard]] std::uint64_t baseline_instructions(const OpRecord& op, const BaselineParams& params);

/// Expands the trace into baseline GPU instructions and prices them.
[[nodiscard]] RunReport simulate_baseline(const EventLog& trace, const CostTable& table);

/// ALUs and near-memory logic in parallel: register loads and stores run on
/// the ALU side, PR writes on the near-memory side, and fused work is split
/// between the two so that max(ALU time, NRF time) is minimal.
[[nodiscard]] RunReport simulate_base_plus_abi(const EventLog& trace, const CostTable& table);

struct RatioSummary {
    double speedup_abi = 1.0;
    double speedup_base_plus_abi = 1.0;
    double efficiency_abi = 1.0;
    double efficiency_base_plus_abi = 1.0;
    /// ABI energy with SP_ACT off over ABI energy with SP_ACT on.
    std::optional<double> sparsity_savings;
};

struct ReportSet {
    RunReport base;
    RunReport abi;
    RunReport base_plus_abi;
    std::optional<RunReport> abi_sparsity_off;
};

/// ComparisonError when the reports come from different workloads or seeds.
[[nodiscard]] RatioSummary compare(const ReportSet& reports);

[[nodiscard]] nlohmann::json to_json(const RunReport& r);
[[nodiscard]] nlohmann::json to_json(const RatioSummary& r);
/// Stable CSV layout: workload,variant,seed,cycles,energy,ops,instructions,
/// ops_per_energy, then one column per event class in enum order.
[[nodiscard]] std::string csv_header();
[[nodiscard]] std::string to_csv_row(const RunReport& r);

/// Shortest round-trip decimal rendering of a double, used by CSV output.
[[nodiscard]] std::string format_number(double v);

}  // namespace abisim
