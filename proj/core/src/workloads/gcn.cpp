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

#include "abisim/workloads/gcn.hpp"

#include <algorithm>

#include "abisim/errors.hpp"

namespace abisim::workloads {

std::int64_t GcnSpec::degree(std::size_t i) const {
    std::int64_t d = 0;
    for (auto v : adj.row(i)) d += v;
    return d;
}

void GcnSpec::validate() const {
    if (x.rows == 0 || x.cols == 0 || w.cols == 0) throw SchemaError("GCN matrices must be non-empty");
    if (w.rows != x.cols) throw SchemaError("W rows must equal the feature count");
    if (adj.rows != x.rows || adj.cols != x.rows) throw SchemaError("Adj must be nodes x nodes");
    for (auto v : adj.data) {
        if (v != 0 && v != 1) throw SchemaError("Adj entries must be 0 or 1");
    }
    for (std::size_t i = 0; i < nodes(); ++i) {
        if (degree(i) < 1) throw SchemaError("every node needs at least one neighbour");
    }
}

GcnParams gcn_params(const WorkloadSpec& spec) {
    GcnParams p;
    ParamReader dims(spec.dims, "dims");
    p.nodes = static_cast<std::size_t>(dims.get_int("nodes", 8, 1, 256));
    p.features = static_cast<std::size_t>(dims.get_int("features", 8, 1, 256));
    p.channels = static_cast<std::size_t>(dims.get_int("channels", 4, 1, 64));
    dims.finish();
    ParamReader(spec.schedule, "schedule").finish();
    return p;
}

GcnSpec random_gcn(const GcnParams& p, int bit_wid, double sparsity, Rng& rng) {
    const auto mag = max_magnitude(bit_wid);
    GcnSpec s;
    s.x = Matrix(p.nodes, p.features);
    for (auto& v : s.x.data) v = sparse_value(rng, mag, sparsity);
    s.w = Matrix(p.features, p.channels);
    for (auto& v : s.w.data) v = rng.uniform_int(-mag, mag);
    s.adj = Matrix(p.nodes, p.nodes);
    for (std::size_t i = 0; i < p.nodes; ++i) {
        for (std::size_t j = 0; j < p.nodes; ++j) s.adj.at(i, j) = (i == j || !rng.bernoulli(sparsity)) ? 1 : 0;
    }
    return s;
}

GcnResult gcn_oracle(const GcnSpec& s) {
    s.validate();
    const auto n = s.nodes();
    const auto c = s.w.cols;
    GcnResult r;
    r.combine_scaled = Matrix(n, c);
    r.combine = Matrix(n, c);
    r.aggregate = Matrix(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::int64_t> z(c, 0);
        for (std::size_t ch = 0; ch < c; ++ch) {
            std::int64_t acc = 0;
            for (std::size_t f = 0; f < s.x.cols; ++f) acc += s.x.at(i, f) * s.w.at(f, ch);
            z[ch] = acc / s.degree(i);
            r.combine_scaled.at(i, ch) = z[ch];
        }
        const auto probs = lwsm_reference(z);
        for (std::size_t ch = 0; ch < c; ++ch) r.combine.at(i, ch) = probs[ch];
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            std::int64_t acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += s.adj.at(i, j) * r.combine.at(j, ch);
            r.aggregate.at(i, ch) = acc;
        }
    }
    return r;
}

std::size_t gcn_rows(const GcnSpec& s, std::size_t banks) {
    return s.w.cols * ceil_div(s.x.cols, banks) + s.nodes() * ceil_div(s.nodes(), banks);
}

GcnResult gcn_layer(Engine& engine, const GcnSpec& s) {
    s.validate();
    const auto banks = engine.banks();
    const auto n = s.nodes();
    const auto c = s.w.cols;
    const auto f_tiles = ceil_div(s.x.cols, banks);
    const auto n_tiles = ceil_div(n, banks);
    const auto adj_base = c * f_tiles;
    for (std::size_t ch = 0; ch < c; ++ch) preload_tiled(engine, ch * f_tiles, s.w.column(ch));
    for (std::size_t i = 0; i < n; ++i) preload_tiled(engine, adj_base + i * n_tiles, s.adj.row(i));

    GcnResult r;
    r.combine_scaled = Matrix(n, c);
    r.combine = Matrix(n, c);
    r.aggregate = Matrix(n, c);

    // Combination: softmax over channels of (X_i . W_c) / deg(i).
    const int bw = engine.regs().bit_wid;
    program_th(engine, ThMode::Softmax);
    set_scaler(engine, true);
    for (std::size_t i = 0; i < n; ++i) {
        engine.load_reg2(Word::make(static_cast<std::int32_t>(s.degree(i))));
        for (std::size_t ch = 0; ch < c; ++ch) {
            const auto& res = tiled_dot(engine, ch * f_tiles, s.x.row(i), ch == 0);
            r.combine_scaled.at(i, ch) = res.scaled;
        }
        engine.stout_lwsm();
        const auto& outs = engine.outputs();
        for (std::size_t ch = 0; ch < c; ++ch) r.combine.at(i, ch) = outs[outs.size() - c + ch];
    }

    // Aggregation: each combination column goes to REG against the Adj rows.
    program_th(engine, ThMode::Bypass);
    set_scaler(engine, false);
    set_bit_wid(engine, std::max(bw, bits_for(r.combine.data)));
    for (std::size_t ch = 0; ch < c; ++ch) {
        const auto col = r.combine.column(ch);
        for (std::size_t i = 0; i < n; ++i) {
            tiled_dot(engine, adj_base + i * n_tiles, col, i == 0);
            r.aggregate.at(i, ch) = engine.stout();
        }
    }
    set_bit_wid(engine, bw);
    return r;
}

WorkloadOutcome run_gcn(const WorkloadSpec& spec) {
    const auto params = gcn_params(spec);
    WorkloadOutcome out;
    out.workload = "gcn";
    out.seed = spec.seed;
    out.instances = spec.instances;
    Rng rng(spec.seed);
    const auto rows = params.channels * ceil_div(params.features, spec.mode.banks) +
                      params.nodes * ceil_div(params.nodes, spec.mode.banks);
    auto engine = make_engine(spec.mode, spec.bit_wid, rows);
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t inst = 0; inst < spec.instances; ++inst) {
        const auto s = random_gcn(params, spec.bit_wid, spec.sparsity, rng);
        const auto expect = gcn_oracle(s);
        const auto got = gcn_layer(engine, s);
        const bool ok = got == expect;
        out.oracle_match = out.oracle_match && ok;
        runs.push_back({{"match", ok},
                        {"combine_scaled", to_json(got.combine_scaled)},
                        {"combine", to_json(got.combine)},
                        {"aggregate", to_json(got.aggregate)}});
    }
    out.detail = {{"runs", runs}, {"frac_bits", engine.lwsm_frac_bits()}};
    out.log = engine.log();
    out.final_regs = engine.regs();
    return out;
}

}  // namespace abisim::workloads
