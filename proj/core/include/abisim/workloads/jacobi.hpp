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

#include "abisim/engine.hpp"
#include "abisim/workloads/common.hpp"

namespace abisim::workloads {

/// Strictly diagonally dominant integer system A x = b.
struct LinearSystem {
    Matrix a;
    std::vector<std::int64_t> b;
    std::vector<std::int64_t> x0;
    /// Integer solution the system was built from (b = A x_true).
    std::vector<std::int64_t> x_true;

    [[nodiscard]] std::size_t size() const noexcept { return b.size(); }
    /// SchemaError unless |a_ii| > sum_{j != i} |a_ij| for every row.
    void validate() const;
};

struct JacobiParams {
    std::size_t n = 8;
    std::size_t iterations = 12;
};

[[nodiscard]] JacobiParams jacobi_params(const WorkloadSpec& spec);

/// Off-diagonal couplings in the bit_wid magnitude range (zero with
/// probability `sparsity`), |a_ii| = 2 sum |a_ij| + 1 + slack, so the Jacobi
/// iteration matrix has spectral radius below 1/2. x_true is drawn with
/// headroom so every iterate stays representable at bit_wid.
[[nodiscard]] LinearSystem random_system(std::size_t n, int bit_wid, double sparsity, Rng& rng);

// --- oracles --------------------------------------------------------------

/// One integer Jacobi step with the engine's truncating division.
[[nodiscard]] std::vector<std::int64_t> jacobi_step_oracle(const LinearSystem& sys,
                                                           const std::vector<std::int64_t>& x);
/// Floating-point Jacobi iterated to convergence (the reference solution).
[[nodiscard]] std::vector<double> jacobi_float_solution(const LinearSystem& sys, std::size_t max_iter = 500);

// --- engine mapping -------------------------------------------------------

[[nodiscard]] std::size_t jacobi_rows(std::size_t n, std::size_t banks);
/// Places the off-diagonal couplings (diagonal slot zeroed) row by row, tiled
/// over the banks. Enables the scaler; TH passes the scaled value through.
void jacobi_load(Engine& engine, const LinearSystem& sys);
/// x_i^{k+1} = (b_i - sum_{j != i} a_ij x_j^k) / a_ii on the engine: CA seeded
/// with b_i subtracts every tile, the scaler divides by REG'' = a_ii.
[[nodiscard]] std::vector<std::int64_t> jacobi_step(Engine& engine, const LinearSystem& sys,
                                                    const std::vector<std::int64_t>& x);

struct JacobiRun {
    std::vector<std::int64_t> x;
    std::size_t iterations = 0;
    bool converged = false;
    bool steps_match = true;
    double max_error = 0.0;
};

[[nodiscard]] JacobiRun jacobi_solve(Engine& engine, const LinearSystem& sys, std::size_t iterations);

[[nodiscard]] WorkloadOutcome run_jacobi(const WorkloadSpec& spec);

}  // namespace abisim::workloads
