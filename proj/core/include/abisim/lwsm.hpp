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
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace abisim {

/// Fixed-point 1+x with x in [0,1): raw in [2^frac_bits, 2^(frac_bits+1)).
struct LwsmFixed {
    std::uint32_t raw = 0;
    int frac_bits = 8;

    [[nodiscard]] bool valid() const noexcept;
    [[nodiscard]] static LwsmFixed from_unit(double x, int frac_bits = 8);
};

/// Lightweight softmax output. probs[i] = 2^shifts[i], shifts[i] <= 0.
struct LwsmResult {
    std::vector<int> shifts;
    std::vector<double> probs;
    std::size_t argmax = 0;
    std::uint64_t upd_cnt = 0;
    /// Adder operations (summation) and leading-one searches performed.
    std::uint64_t sum_ops = 0;
    std::uint64_t find_first_ops = 0;

    [[nodiscard]] std::uint64_t event_count() const noexcept { return sum_ops + find_first_ops; }
};

/// Index of the most significant set bit, floor(log2(raw)).
/// EmptyValueError for raw == 0.
[[nodiscard]] int find_first_one(std::uint64_t raw);

/// Approximate softmax over raw In1 values: the division In1/UpdCnt becomes
/// a difference of leading-one positions, decoded as a power of two.
/// Ties on position resolve to the lowest index.
[[nodiscard]] LwsmResult lwsm(std::span<const std::uint32_t> in1);
/// Same, validating that every input is a well-formed 1+x value.
[[nodiscard]] LwsmResult lwsm(std::span<const LwsmFixed> in1);

/// Probability 2^shift in Q0.frac_bits (0 when it underflows).
[[nodiscard]] std::int64_t prob_fixed(int shift, int frac_bits) noexcept;

/// Maps integer scores onto 1+x values. x = (s - min) / R with R the
/// smallest power of two strictly above (max - min), so the division is a
/// right shift and x lies in [0,1).
[[nodiscard]] std::vector<std::uint32_t> normalize_scores(std::span<const std::int64_t> scores, int frac_bits = 8);

struct LwsmSweepStats {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double argmax_agreement = 0.0;
    double mean_abs_err = 0.0;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    /// Vectors whose largest 1+x is at least twice the runner-up.
    std::size_t octave_subset = 0;
    double octave_agreement = 1.0;
    /// prob/exact ratio histogram: 8 equal bins of log2(ratio) over (-1, 1).
    std::vector<std::uint64_t> ratio_histogram;
};

/// Random vectors with x uniform in [0,1), compared against the exact
/// (1+x)/sum(1+x) ratios. Deterministic in `seed`.
[[nodiscard]] LwsmSweepStats lwsm_error_sweep(std::size_t n, std::size_t trials, std::uint64_t seed,
                                              int frac_bits = 8);

[[nodiscard]] nlohmann::json to_json(const LwsmSweepStats& s);

}  // namespace abisim
