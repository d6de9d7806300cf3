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

#include "abisim/lwsm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "abisim/errors.hpp"
#include "abisim/rng.hpp"

namespace abisim {

bool LwsmFixed::valid() const noexcept {
    if (frac_bits < 1 || frac_bits > 14) return false;
    const std::uint32_t lo = 1u << frac_bits;
    return raw >= lo && raw < (lo << 1);
}

LwsmFixed LwsmFixed::from_unit(double x, int frac_bits) {
    if (!(x >= 0.0 && x < 1.0)) throw RangeError("x must lie in [0,1)");
    const std::uint32_t one = 1u << frac_bits;
    return {one + static_cast<std::uint32_t>(std::floor(x * one)), frac_bits};
}

int find_first_one(std::uint64_t raw) {
    if (raw == 0) throw EmptyValueError("find_first_one of zero");
    return std::bit_width(raw) - 1;
}

LwsmResult lwsm(std::span<const std::uint32_t> in1) {
    if (in1.empty()) throw EmptyValueError("lwsm of an empty vector");
    LwsmResult res;
    std::uint64_t upd_cnt = 0;
    for (auto v : in1) {
        if (v == 0) throw EmptyValueError("lwsm input element is zero");
        upd_cnt += v;
    }
    if (upd_cnt > std::numeric_limits<std::uint32_t>::max()) throw OverflowError("lwsm sum exceeds 32 bits");
    res.upd_cnt = upd_cnt;
    res.sum_ops = in1.size();
    res.find_first_ops = in1.size() + 1;

    const int pos_sum = find_first_one(upd_cnt);
    res.shifts.reserve(in1.size());
    res.probs.reserve(in1.size());
    int best = std::numeric_limits<int>::min();
    for (std::size_t i = 0; i < in1.size(); ++i) {
        const int shift = find_first_one(in1[i]) - pos_sum;
        res.shifts.push_back(shift);
        res.probs.push_back(std::ldexp(1.0, shift));
        if (shift > best) {
            best = shift;
            res.argmax = i;
        }
    }
    return res;
}

LwsmResult lwsm(std::span<const LwsmFixed> in1) {
    std::vector<std::uint32_t> raw;
    raw.reserve(in1.size());
    for (const auto& f : in1) {
        if (!f.valid()) throw RangeError("lwsm input " + std::to_string(f.raw) + " is not a valid 1+x value");
        raw.push_back(f.raw);
    }
    return lwsm(std::span<const std::uint32_t>(raw));
}

std::int64_t prob_fixed(int shift, int frac_bits) noexcept {
    const int e = frac_bits + shift;
    return e >= 0 ? (std::int64_t{1} << e) : 0;
}

std::vector<std::uint32_t> normalize_scores(std::span<const std::int64_t> scores, int frac_bits) {
    if (scores.empty()) throw EmptyValueError("normalize_scores of an empty vector");
    if (frac_bits < 1 || frac_bits > 14) throw RangeError("frac_bits must be in [1,14]");
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const auto range = static_cast<std::uint64_t>(*hi_it - *lo_it);
    // R = 2^r, smallest power of two strictly greater than the range.
    const int r = std::bit_width(range);
    const std::uint32_t one = 1u << frac_bits;
    std::vector<std::uint32_t> raw;
    raw.reserve(scores.size());
    for (auto s : scores) {
        const auto d = static_cast<std::uint64_t>(s - *lo_it);
        const auto frac = static_cast<std::uint32_t>((d << frac_bits) >> r);
        raw.push_back(one + frac);
    }
    return raw;
}

LwsmSweepStats lwsm_error_sweep(std::size_t n, std::size_t trials, std::uint64_t seed, int frac_bits) {
    if (n < 2) throw RangeError("lwsm_error_sweep needs n >= 2");
    LwsmSweepStats st;
    st.n = n;
    st.trials = trials;
    st.seed = seed;
    st.ratio_histogram.assign(8, 0);
    st.min_ratio = std::numeric_limits<double>::infinity();
    st.max_ratio = 0.0;

    Rng rng(seed);
    std::vector<std::uint32_t> raw(n);
    std::size_t agree = 0;
    std::size_t octave_agree = 0;
    double abs_err_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& v : raw) v = LwsmFixed::from_unit(rng.uniform01(), frac_bits).raw;
        const auto res = lwsm(std::span<const std::uint32_t>(raw));

        double total = 0.0;
        for (auto v : raw) total += v;
        std::size_t exact_arg = 0;
        std::uint32_t top = 0;
        std::uint32_t second = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (raw[i] > raw[exact_arg]) exact_arg = i;
            if (raw[i] > top) {
                second = top;
                top = raw[i];
            } else if (raw[i] > second) {
                second = raw[i];
            }
            const double exact = raw[i] / total;
            const double ratio = res.probs[i] / exact;
            abs_err_sum += std::fabs(res.probs[i] - exact);
            st.min_ratio = std::min(st.min_ratio, ratio);
            st.max_ratio = std::max(st.max_ratio, ratio);
            const double lr = std::log2(ratio);
            auto bin = static_cast<long>(std::floor((lr + 1.0) * 4.0));
            bin = std::clamp<long>(bin, 0, 7);
            ++st.ratio_histogram[static_cast<std::size_t>(bin)];
        }
        const bool same = exact_arg == res.argmax;
        agree += same ? 1 : 0;
        if (top >= 2ull * second) {
            ++st.octave_subset;
            octave_agree += same ? 1 : 0;
        }
    }
    if (trials > 0) {
        st.argmax_agreement = static_cast<double>(agree) / static_cast<double>(trials);
        st.mean_abs_err = abs_err_sum / static_cast<double>(trials * n);
    } else {
        st.min_ratio = 0.0;
    }
    st.octave_agreement =
        st.octave_subset > 0 ? static_cast<double>(octave_agree) / static_cast<double>(st.octave_subset) : 1.0;
    return st;
}

nlohmann::json to_json(const LwsmSweepStats& s) {
    return nlohmann::json{{"n", s.n},
                          {"trials", s.trials},
                          {"seed", s.seed},
                          {"argmax_agreement", s.argmax_agreement},
                          {"mean_abs_err", s.mean_abs_err},
                          {"max_ratio", s.max_ratio},
                          {"min_ratio", s.min_ratio},
                          {"octave_subset", s.octave_subset},
                          {"octave_agreement", s.octave_agreement},
                          {"ratio_histogram", s.ratio_histogram}};
}

}  // namespace abisim
