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
#include <vector>

#include "abisim/engine.hpp"
#include "abisim/workloads/common.hpp"

namespace abisim::workloads {

/// One valid-mode convolution layer plus an optional fully connected label
/// stage whose class scores go through LWSM.
struct ConvSpec {
    Matrix input;   // H x W activations
    Matrix kernel;  // k x k weights
    std::size_t stride = 1;
    bool relu = true;
    /// Label stage: classes x (out_h * out_w) weights; empty when disabled.
    Matrix class_weights;

    [[nodiscard]] std::size_t out_h() const noexcept { return (input.rows - kernel.rows) / stride + 1; }
    [[nodiscard]] std::size_t out_w() const noexcept { return (input.cols - kernel.cols) / stride + 1; }
    [[nodiscard]] bool label() const noexcept { return class_weights.rows > 0; }
    /// SchemaError on non-square kernels, kernels larger than the input,
    /// zero stride, or label weights of the wrong width.
    void validate() const;
};

struct ConvParams {
    std::size_t h = 6;
    std::size_t w = 6;
    std::size_t k = 3;
    std::size_t stride = 1;
    bool relu = true;
    std::size_t classes = 4;  // 0 disables the label stage
};

[[nodiscard]] ConvParams conv_params(const WorkloadSpec& spec);
/// Activations (zero with probability `sparsity`) and weights drawn from the
/// bit_wid magnitude range.
[[nodiscard]] ConvSpec random_conv(const ConvParams& p, int bit_wid, double sparsity, Rng& rng);

struct ConvResult {
    /// Pre-ReLU output map.
    Matrix pre_activation;
    /// Output map after ReLU (equal to pre_activation without ReLU).
    Matrix output;
    std::vector<std::int64_t> class_scores;
    /// Q0.frac LWSM probabilities of the class scores.
    std::vector<std::int64_t> class_probs;
    std::optional<std::size_t> label;

    friend bool operator==(const ConvResult&, const ConvResult&) = default;
};

/// Nested-loop convolution, exact matmul for scores, reference LWSM.
[[nodiscard]] ConvResult conv_oracle(const ConvSpec& spec);

[[nodiscard]] std::size_t conv_rows(const ConvSpec& spec, std::size_t banks);

/// Weight-stationary mapping: kernel taps sit in memory tiled over the
/// banks (a 3x3 kernel on 8 banks is one 8-tap op plus a residual 1-tap op
/// chained through the accumulator); the activation patch is loaded into REG.
/// ReLU is the TH function of the last tile. The label stage stores class
/// weights in memory, feeds the output map through REG with SM_ACT set, and
/// drains the softmax buffer with STOUT.
[[nodiscard]] ConvResult conv2d(Engine& engine, const ConvSpec& spec);

[[nodiscard]] WorkloadOutcome run_conv(const WorkloadSpec& spec);

}  // namespace abisim::workloads
