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
#include <vector>

#include <nlohmann/json.hpp>

#include "abisim/cost_model.hpp"
#include "abisim/engine.hpp"
#include "abisim/isa.hpp"

namespace abisim {

/// Observable result of one executed instruction.
struct StepResult {
    std::size_t index = 0;
    std::size_t line = 0;
    Opcode op = Opcode::HALT;
    /// Compute ops: raw_sum, scaled, th_out, l1, cycles, per_bank.
    /// STOUT: the stored value(s). Other ops: empty object.
    nlohmann::json detail = nlohmann::json::object();
};

struct ProgramRun {
    std::vector<StepResult> steps;
    std::vector<std::int64_t> outputs;
    /// ABI accounting of the run; `extra` carries steps, outputs, the
    /// sparsity monitor state and the baseline instruction count.
    RunReport report;
};

/// Executes `program` sequentially on `engine` until HALT.
///
/// Runtime errors abort with ExecutionError carrying the instruction index
/// and a JSON snapshot of the engine.
[[nodiscard]] ProgramRun run_program(const Program& program, Engine& engine, const CostTable& table);

[[nodiscard]] nlohmann::json to_json(const StepResult& s);

}  // namespace abisim
