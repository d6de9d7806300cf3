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

/// One graph-convolution layer: combine = LWSM((X W) / deg) per node,
/// aggregate = Adj * combine.
struct GcnSpec {
    Matrix x;    // nodes x features
    Matrix w;    // features x channels
    Matrix adj;  // nodes x nodes, 0/1 with self loops

    [[nodiscard]] std::size_t nodes() const noexcept { return x.rows; }
    /// Neighbour count of node i (row sum of Adj, self loop included).
    [[nodiscard]] std::int64_t degree(std::size_t i) const;
    /// SchemaError on non-conformant shapes, non-binary Adj or zero degree.
    void validate() const;
};

struct GcnParams {
    std::size_t nodes = 8;
    std::size_t features = 8;
    std::size_t channels = 4;
};

[[nodiscard]] GcnParams gcn_params(const WorkloadSpec& spec);
/// Features zero with probability `sparsity`; off-diagonal edges present
/// with probability 1 - sparsity; self loops always present.
[[nodiscard]] GcnSpec random_gcn(const GcnParams& p, int bit_wid, double sparsity, Rng& rng);

struct GcnResult {
    /// (X W) / deg with truncating division, before LWSM.
    Matrix combine_scaled;
    /// Q0.frac LWSM probabilities per node (rows) and channel (cols).
    Matrix combine;
    /// Adj * combine.
    Matrix aggregate;

    friend bool operator==(const GcnResult&, const GcnResult&) = default;
};

[[nodiscard]] GcnResult gcn_oracle(const GcnSpec& spec);
[[nodiscard]] std::size_t gcn_rows(const GcnSpec& spec, std::size_t banks);

/// Combination keeps W columns in memory and the node features in REG, with
/// REG'' = deg(i) for the scaler and SM_ACT set. Aggregation writes each
/// combination column into REG and multiplies it with the Adj rows in memory.
[[nodiscard]] GcnResult gcn_layer(Engine& engine, const GcnSpec& spec);

[[nodiscard]] WorkloadOutcome run_gcn(const WorkloadSpec& spec);

}  // namespace abisim::workloads
