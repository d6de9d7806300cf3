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

#include "abisim/workloads/attention.hpp"

#include <algorithm>
#include <cmath>

#include "abisim/errors.hpp"

namespace abisim::workloads {

std::int64_t AttnSpec::divisor() const {
    const auto d = static_cast<std::int64_t>(q.cols);
    if (scaling == AttnScale::D) return d;
    return std::max<std::int64_t>(1, std::llround(std::sqrt(static_cast<double>(d))));
}

void AttnSpec::validate() const {
    if (q.cols == 0 || q.rows == 0 || k.rows == 0 || v.cols == 0) throw SchemaError("attention matrices must be non-empty");
    if (k.cols != q.cols) throw SchemaError("Q and K must share the embedding size");
    if (v.rows != k.rows) throw SchemaError("V must have one row per key");
}

AttnParams attn_params(const WorkloadSpec& spec) {
    AttnParams p;
    ParamReader dims(spec.dims, "dims");
    p.queries = static_cast<std::size_t>(dims.get_int("queries", 4, 1, 256));
    p.keys = static_cast<std::size_t>(dims.get_int("keys", 8, 1, 256));
    p.d = static_cast<std::size_t>(dims.get_int("d", 8, 1, 256));
    p.dv = static_cast<std::size_t>(dims.get_int("dv", 4, 1, 256));
    const auto scaling = dims.get_string("scaling", "d");
    if (scaling == "d") p.scaling = AttnScale::D;
    else if (scaling == "sqrt_d") p.scaling = AttnScale::SqrtD;
    else throw SchemaError("dims.scaling must be \"d\" or \"sqrt_d\"");
    dims.finish();
    ParamReader(spec.schedule, "schedule").finish();
    return p;
}

AttnSpec random_attn(const AttnParams& p, int bit_wid, double sparsity, Rng& rng) {
    const auto mag = max_magnitude(bit_wid);
    AttnSpec s;
    s.scaling = p.scaling;
    s.q = Matrix(p.queries, p.d);
    for (auto& v : s.q.data) v = sparse_value(rng, mag, sparsity);
    s.k = Matrix(p.keys, p.d);
    for (auto& v : s.k.data) v = rng.uniform_int(-mag, mag);
    s.v = Matrix(p.keys, p.dv);
    for (auto& v : s.v.data) v = rng.uniform_int(-mag, mag);
    return s;
}

AttnResult attn_oracle(const AttnSpec& s) {
    s.validate();
    AttnResult r;
    r.scores = Matrix(s.q.rows, s.k.rows);
    r.probs = Matrix(s.q.rows, s.k.rows);
    r.out = Matrix(s.q.rows, s.v.cols);
    for (std::size_t i = 0; i < s.q.rows; ++i) {
        std::vector<std::int64_t> row(s.k.rows);
        for (std::size_t j = 0; j < s.k.rows; ++j) {
            std::int64_t acc = 0;
            for (std::size_t e = 0; e < s.q.cols; ++e) acc += s.q.at(i, e) * s.k.at(j, e);
            row[j] = acc / s.divisor();
            r.scores.at(i, j) = row[j];
        }
        const auto probs = lwsm_reference(row);
        for (std::size_t j = 0; j < s.k.rows; ++j) r.probs.at(i, j) = probs[j];
        for (std::size_t ch = 0; ch < s.v.cols; ++ch) {
            std::int64_t acc = 0;
            for (std::size_t j = 0; j < s.k.rows; ++j) acc += probs[j] * s.v.at(j, ch);
            r.out.at(i, ch) = acc;
        }
    }
    return r;
}

std::size_t attn_rows(const AttnSpec& s, std::size_t banks) {
    return s.k.rows * ceil_div(s.q.cols, banks) + s.v.cols * ceil_div(s.k.rows, banks);
}

AttnResult attention_head(Engine& engine, const AttnSpec& s) {
    s.validate();
    const auto banks = engine.banks();
    const auto d_tiles = ceil_div(s.q.cols, banks);
    const auto k_tiles = ceil_div(s.k.rows, banks);
    const auto v_base = s.k.rows * d_tiles;
    for (std::size_t j = 0; j < s.k.rows; ++j) preload_tiled(engine, j * d_tiles, s.k.row(j));
    for (std::size_t ch = 0; ch < s.v.cols; ++ch) preload_tiled(engine, v_base + ch * k_tiles, s.v.column(ch));

    AttnResult r;
    r.scores = Matrix(s.q.rows, s.k.rows);
    r.probs = Matrix(s.q.rows, s.k.rows);
    r.out = Matrix(s.q.rows, s.v.cols);

    // Scores: (q_i . k_j) / d, buffered for the softmax.
    const int bw = engine.regs().bit_wid;
    program_th(engine, ThMode::Softmax);
    set_scaler(engine, true);
    engine.load_reg2(Word::make(static_cast<std::int32_t>(s.divisor())));
    for (std::size_t i = 0; i < s.q.rows; ++i) {
        for (std::size_t j = 0; j < s.k.rows; ++j) {
            r.scores.at(i, j) = tiled_dot(engine, j * d_tiles, s.q.row(i), j == 0).scaled;
        }
        engine.stout_lwsm();
        const auto& outs = engine.outputs();
        for (std::size_t j = 0; j < s.k.rows; ++j) r.probs.at(i, j) = outs[outs.size() - s.k.rows + j];
    }

    // Values: probability rows through REG against V columns in memory.
    program_th(engine, ThMode::Bypass);
    set_scaler(engine, false);
    set_bit_wid(engine, std::max(bw, bits_for(r.probs.data)));
    for (std::size_t i = 0; i < s.q.rows; ++i) {
        for (std::size_t ch = 0; ch < s.v.cols; ++ch) {
            tiled_dot(engine, v_base + ch * k_tiles, r.probs.row(i), ch == 0);
            r.out.at(i, ch) = engine.stout();
        }
    }
    set_bit_wid(engine, bw);
    return r;
}

WorkloadOutcome run_attention(const WorkloadSpec& spec) {
    const auto params = attn_params(spec);
    WorkloadOutcome out;
    out.workload = "attn";
    out.seed = spec.seed;
    out.instances = spec.instances;
    Rng rng(spec.seed);
    const auto rows = params.keys * ceil_div(params.d, spec.mode.banks) + params.dv * ceil_div(params.keys, spec.mode.banks);
    auto engine = make_engine(spec.mode, spec.bit_wid, rows);
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t inst = 0; inst < spec.instances; ++inst) {
        const auto s = random_attn(params, spec.bit_wid, spec.sparsity, rng);
        const auto expect = attn_oracle(s);
        const auto got = attention_head(engine, s);
        const bool ok = got == expect;
        out.oracle_match = out.oracle_match && ok;
        runs.push_back({{"match", ok},
                        {"scores", to_json(got.scores)},
                        {"probs", to_json(got.probs)},
                        {"out", to_json(got.out)}});
    }
    out.detail = {{"runs", runs},
                  {"scaling", params.scaling == AttnScale::D ? "d" : "sqrt_d"},
                  {"frac_bits", engine.lwsm_frac_bits()}};
    out.log = engine.log();
    out.final_regs = engine.regs();
    return out;
}

}  // namespace abisim::workloads
