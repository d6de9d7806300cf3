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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "abisim/cost_model.hpp"
#include "abisim/workloads/common.hpp"

namespace abisim::workloads {

/// Runs the workload named by `spec.type` with its oracle checks.
[[nodiscard]] WorkloadOutcome run_workload(const WorkloadSpec& spec);

/// ABI, BASE and BASE+ABI reports of one workload plus the SP_ACT-off run
/// used for the sparsity savings ratio.
struct BenchResult {
    WorkloadOutcome outcome;
    ReportSet reports;
    RatioSummary ratios;
};

/// Runs the workload twice (sparsity detection as specified, and off),
/// prices the ABI trace, expands the same trace for BASE and BASE+ABI.
[[nodiscard]] BenchResult bench_workload(const WorkloadSpec& spec, const CostTable& table);

/// Report document of a bench run: spec echo, oracle verdict, the three
/// run reports and the ratio summary.
[[nodiscard]] nlohmann::json to_json(const BenchResult& r, const WorkloadSpec& spec);

// --- calibration ------------------------------------------------------------

struct BandCheck {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct CalibrationReport {
    std::vector<BandCheck> checks;
    /// Event totals of every scenario, for offline price fitting.
    nlohmann::json scenarios = nlohmann::json::object();

    [[nodiscard]] bool all_pass() const noexcept;
};

/// Target ratio bands of the cost model:
///  - ABI/BASE speedup in [3,6] and (BASE+ABI)/BASE in [6,16] per workload,
///  - (BP,ES) vs (BS,ES) energy of 1-bit Ising in [1.5,1.9],
///  - L2 vs L1 placement energy in [1.2,1.6],
///  - sparsity savings of a 70%-sparse GCN in [1.3,1.8],
///  - fixed vs dynamic-resolution Ising power in [1.1,1.4].
[[nodiscard]] CalibrationReport calibrate_check(const CostTable& table);

[[nodiscard]] nlohmann::json to_json(const CalibrationReport& r);

/// Scenario runs behind the non-speedup bands (exposed for tests).
[[nodiscard]] double bp_bs_energy_ratio(const CostTable& table);
[[nodiscard]] double l2_l1_energy_ratio(const CostTable& table);
[[nodiscard]] double sparsity_savings_ratio(const CostTable& table, double sparsity);
[[nodiscard]] double r3_power_saving(const CostTable& table);

// --- sweeps -------------------------------------------------------------------

/// One point of a sweep grid. The run id orders merged results.
struct SweepPoint {
    WorkloadSpec spec;
    [[nodiscard]] std::string run_id() const;
};

struct SweepResult {
    std::string run_id;
    bool oracle_match = true;
    RunReport abi;
    RunReport base;
    RunReport base_plus_abi;
    RatioSummary ratios;
};

/// Cartesian grid over seeds, bit widths and sparsities for `base`.
[[nodiscard]] std::vector<SweepPoint> sweep_grid(const WorkloadSpec& base, const std::vector<std::uint64_t>& seeds,
                                                 const std::vector<int>& bit_wids,
                                                 const std::vector<double>& sparsities);

/// Runs every point (up to `threads` at once, each with its own engine) and
/// returns the results sorted by run id.
[[nodiscard]] std::vector<SweepResult> run_sweep(const std::vector<SweepPoint>& points, const CostTable& table,
                                                 unsigned threads = 1);

[[nodiscard]] nlohmann::json to_json(const SweepResult& r);

}  // namespace abisim::workloads
