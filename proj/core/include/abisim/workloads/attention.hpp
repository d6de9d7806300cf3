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

/// How attention scores are scaled before the softmax.
enum class AttnScale : std::uint8_t {
    /// Divide by the embedding count d.
    D,
    /// Divide by round(sqrt(d)), the conventional choice.
    SqrtD
};

/// Single attention head on integer Q, K, V.
struct AttnSpec {
    Matrix q;  // queries x d
    Matrix k;  // keys x d
    Matrix v;  // keys x dv
    AttnScale scaling = AttnScale::D;

    [[nodiscard]] std::int64_t divisor() const;
    /// SchemaError on non-conformant shapes or d == 0.
    void validate() const;
};

struct AttnParams {
    std::size_t queries = 4;
    std::size_t keys = 8;
    std::size_t d = 8;
    std::size_t dv = 4;
    AttnScale scaling = AttnScale::D;
};

[[nodiscard]] AttnParams attn_params(const WorkloadSpec& spec);
/// Q entries zero with probability `sparsity`; K and V dense.
[[nodiscard]] AttnSpec random_attn(const AttnParams& p, int bit_wid, double sparsity, Rng& rng);

struct AttnResult {
    /// (Q K^T) / divisor with truncating division.
    Matrix scores;
    /// Q0.frac LWSM probabilities per query row.
    Matrix probs;
    /// probs * V.
    Matrix out;

    friend bool operator==(const AttnResult&, const AttnResult&) = default;
};

[[nodiscard]] AttnResult attn_oracle(const AttnSpec& spec);
[[nodiscard]] std::size_t attn_rows(const AttnSpec& spec, std::size_t banks);

/// K rows sit in memory and each query in REG; the scaler divides by d and
/// SM_ACT buffers the scores for STOUT's LWSM. The value stage keeps V
/// columns in memory and feeds each probability row through REG.
[[nodiscard]] AttnResult attention_head(Engine& engine, const AttnSpec& spec);

[[nodiscard]] WorkloadOutcome run_attention(const WorkloadSpec& spec);

}  // namespace abisim::workloads
