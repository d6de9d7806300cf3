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
#include <string>
#include <vector>

#include "abisim/engine.hpp"
#include "abisim/workloads/common.hpp"

namespace abisim::workloads {

/// Ising model on a rows x cols King's graph (up to 8 neighbours per site).
struct IsingModel {
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// Symmetric couplings, zero diagonal, zero between non-neighbours.
    Matrix j;
    /// Spins in {-1, +1}.
    std::vector<int> sigma;
    /// Sorted neighbour lists.
    std::vector<std::vector<std::size_t>> neighbors;

    [[nodiscard]] std::size_t size() const noexcept { return sigma.size(); }
    /// SchemaError if J is asymmetric, has a non-zero diagonal, or a spin is not +-1.
    void validate() const;
};

struct IsingParams {
    std::size_t rows = 4;
    std::size_t cols = 4;
    /// |J| bound; defaults to the largest magnitude at the spec's bit_wid.
    std::int64_t j_max = 1;
    std::size_t max_sweeps = 8;
    /// Resolution of the spin-change L1-norm phase. Equal to the update
    /// resolution means fixed width; lower values switch resolution between
    /// the two phases.
    int l1_bit_wid = 1;
    /// Termination threshold on the L1 norm of the spin-change vector.
    std::int64_t epsilon = 0;
    /// "random" couplings or "ferro" (all J = +1).
    std::string couplings = "random";
};

[[nodiscard]] IsingParams ising_params(const WorkloadSpec& spec);

/// Neighbour lists of the King's graph (8-connected grid), row-major sites.
[[nodiscard]] std::vector<std::vector<std::size_t>> kings_graph(std::size_t rows, std::size_t cols);

/// Random couplings in [-j_max, j_max] on every King's-graph edge, random spins.
[[nodiscard]] IsingModel random_ising(std::size_t rows, std::size_t cols, std::int64_t j_max, Rng& rng);
/// All-J model with uniform couplings `j` on every edge and all spins `s`.
[[nodiscard]] IsingModel uniform_ising(std::size_t rows, std::size_t cols, std::int64_t j, int s);

// --- oracles --------------------------------------------------------------

/// H_i = sum_j J_ij sigma_j.
[[nodiscard]] std::int64_t local_field_oracle(const IsingModel& m, std::size_t i);
/// E = -sum_{i<j} J_ij sigma_i sigma_j.
[[nodiscard]] std::int64_t energy_oracle(const IsingModel& m);
/// Sequential sign update sweep with ties to +1; returns the spin-change L1 norm.
std::int64_t sweep_oracle(IsingModel& m);

// --- engine mapping -------------------------------------------------------

/// Memory rows used by a model on an engine with `banks` banks.
[[nodiscard]] std::size_t ising_rows(const IsingModel& m, std::size_t banks);

/// Preloads the coupling rows (neighbour slots tiled over the banks) and
/// zeroes the spin-change rows. Programs TH as a compare against zero.
void ising_load(Engine& engine, const IsingModel& m);

/// Local field of site i through fused ops: REG holds the neighbour spins
/// (1-bit spin words), memory holds the couplings. Returns the CA sum.
std::int64_t ising_local_field(Engine& engine, const IsingModel& m, std::size_t i);

struct IsingRun {
    std::size_t sweeps = 0;
    bool converged = false;
    /// Oracle energy after every site update.
    std::vector<std::int64_t> energy_trace;
    /// Engine-computed spin-change L1 norm per sweep.
    std::vector<std::int64_t> l1_norms;
    bool fields_match = true;
    bool l1_match = true;
    bool energy_monotone = true;
};

/// Sequential sweeps until the L1 norm drops to epsilon or max_sweeps.
/// Each update computes H_i on the engine, takes sign(H_i) from the TH
/// compare and writes the new spin back to memory with STOUT. The L1 norm
/// phase runs one compare op per site at `l1_bit_wid`.
[[nodiscard]] IsingRun ising_anneal(Engine& engine, IsingModel& m, const IsingParams& params, int update_bit_wid);

[[nodiscard]] WorkloadOutcome run_ising(const WorkloadSpec& spec);

}  // namespace abisim::workloads
