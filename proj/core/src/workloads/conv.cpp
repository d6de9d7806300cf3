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

#include "abisim/workloads/conv.hpp"

#include <algorithm>

#include "abisim/errors.hpp"

namespace abisim::workloads {

namespace {

std::vector<std::int64_t> patch(const ConvSpec& s, std::size_t oy, std::size_t ox) {
    std::vector<std::int64_t> out;
    out.reserve(s.kernel.rows * s.kernel.cols);
    for (std::size_t ky = 0; ky < s.kernel.rows; ++ky) {
        for (std::size_t kx = 0; kx < s.kernel.cols; ++kx) {
            out.push_back(s.input.at(oy * s.stride + ky, ox * s.stride + kx));
        }
    }
    return out;
}

std::size_t first_argmax(const std::vector<std::int64_t>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void ConvSpec::validate() const {
    if (kernel.rows == 0 || kernel.rows != kernel.cols) throw SchemaError("kernel must be square and non-empty");
    if (kernel.rows > input.rows || kernel.cols > input.cols) throw SchemaError("kernel larger than the input");
    if (stride == 0) throw SchemaError("stride must be >= 1");
    if (label() && class_weights.cols != out_h() * out_w()) {
        throw SchemaError("class weights must cover the whole output map");
    }
}

ConvParams conv_params(const WorkloadSpec& spec) {
    ConvParams p;
    ParamReader dims(spec.dims, "dims");
    p.h = static_cast<std::size_t>(dims.get_int("h", 6, 1, 256));
    p.w = static_cast<std::size_t>(dims.get_int("w", 6, 1, 256));
    p.k = static_cast<std::size_t>(dims.get_int("k", 3, 1, 16));
    p.stride = static_cast<std::size_t>(dims.get_int("stride", 1, 1, 16));
    p.relu = dims.get_bool("relu", true);
    p.classes = static_cast<std::size_t>(dims.get_int("classes", 4, 0, 64));
    dims.finish();
    ParamReader(spec.schedule, "schedule").finish();
    if (p.k > p.h || p.k > p.w) throw SchemaError("kernel larger than the input");
    return p;
}

ConvSpec random_conv(const ConvParams& p, int bit_wid, double sparsity, Rng& rng) {
    const auto mag = max_magnitude(bit_wid);
    ConvSpec s;
    s.stride = p.stride;
    s.relu = p.relu;
    s.input = Matrix(p.h, p.w);
    for (auto& v : s.input.data) v = sparse_value(rng, mag, sparsity);
    s.kernel = Matrix(p.k, p.k);
    for (auto& v : s.kernel.data) v = rng.uniform_int(-mag, mag);
    if (p.classes > 0) {
        s.class_weights = Matrix(p.classes, s.out_h() * s.out_w());
        for (auto& v : s.class_weights.data) v = rng.uniform_int(-mag, mag);
    }
    return s;
}

ConvResult conv_oracle(const ConvSpec& s) {
    s.validate();
    ConvResult r;
    r.pre_activation = Matrix(s.out_h(), s.out_w());
    r.output = Matrix(s.out_h(), s.out_w());
    for (std::size_t oy = 0; oy < s.out_h(); ++oy) {
        for (std::size_t ox = 0; ox < s.out_w(); ++ox) {
            std::int64_t acc = 0;
            for (std::size_t ky = 0; ky < s.kernel.rows; ++ky) {
                for (std::size_t kx = 0; kx < s.kernel.cols; ++kx) {
                    acc += s.kernel.at(ky, kx) * s.input.at(oy * s.stride + ky, ox * s.stride + kx);
                }
            }
            r.pre_activation.at(oy, ox) = acc;
            r.output.at(oy, ox) = s.relu ? std::max<std::int64_t>(acc, 0) : acc;
        }
    }
    if (s.label()) {
        for (std::size_t c = 0; c < s.class_weights.rows; ++c) {
            std::int64_t acc = 0;
            for (std::size_t m = 0; m < r.output.data.size(); ++m) acc += s.class_weights.at(c, m) * r.output.data[m];
            r.class_scores.push_back(acc);
        }
        r.class_probs = lwsm_reference(r.class_scores);
        r.label = first_argmax(r.class_probs);
    }
    return r;
}

std::size_t conv_rows(const ConvSpec& s, std::size_t banks) {
    const auto taps = ceil_div(s.kernel.rows * s.kernel.cols, banks);
    const auto cls = s.label() ? s.class_weights.rows * ceil_div(s.class_weights.cols, banks) : 0;
    return taps + cls;
}

ConvResult conv2d(Engine& engine, const ConvSpec& s) {
    s.validate();
    const auto banks = engine.banks();
    const auto tap_tiles = ceil_div(s.kernel.data.size(), banks);
    preload_tiled(engine, 0, s.kernel.data);

    // Conv phase: ReLU or pass-through.
    const int conv_bw = engine.regs().bit_wid;
    program_th(engine, s.relu ? ThMode::Relu : ThMode::Bypass);
    set_scaler(engine, false);

    ConvResult r;
    r.pre_activation = Matrix(s.out_h(), s.out_w());
    r.output = Matrix(s.out_h(), s.out_w());
    for (std::size_t oy = 0; oy < s.out_h(); ++oy) {
        for (std::size_t ox = 0; ox < s.out_w(); ++ox) {
            const auto& res = tiled_dot(engine, 0, patch(s, oy, ox), true);
            r.pre_activation.at(oy, ox) = res.scaled;
            r.output.at(oy, ox) = engine.stout();
        }
    }

    if (s.label()) {
        const auto m = s.class_weights.cols;
        const auto m_tiles = ceil_div(m, banks);
        for (std::size_t c = 0; c < s.class_weights.rows; ++c) {
            preload_tiled(engine, tap_tiles + c * m_tiles, s.class_weights.row(c));
        }
        // Scores need the resolution of the (unbounded) conv outputs.
        std::vector<std::int64_t> operands(r.output.data.begin(), r.output.data.end());
        operands.insert(operands.end(), s.class_weights.data.begin(), s.class_weights.data.end());
        set_bit_wid(engine, std::max(conv_bw, bits_for(operands)));
        program_th(engine, ThMode::Softmax);
        for (std::size_t c = 0; c < s.class_weights.rows; ++c) {
            const auto& res = tiled_dot(engine, tap_tiles + c * m_tiles, r.output.data, c == 0);
            r.class_scores.push_back(res.scaled);
        }
        const auto& sm = engine.stout_lwsm();
        const auto& outs = engine.outputs();
        r.class_probs.assign(outs.end() - static_cast<std::ptrdiff_t>(sm.shifts.size()), outs.end());
        r.label = sm.argmax;
        set_bit_wid(engine, conv_bw);
    }
    return r;
}

WorkloadOutcome run_conv(const WorkloadSpec& spec) {
    const auto params = conv_params(spec);
    WorkloadOutcome out;
    out.workload = "cnn";
    out.seed = spec.seed;
    out.instances = spec.instances;
    Rng rng(spec.seed);
    const auto probe = random_conv(params, spec.bit_wid, 0.0, rng);
    rng = Rng(spec.seed);
    auto engine = make_engine(spec.mode, spec.bit_wid, conv_rows(probe, spec.mode.banks));
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t inst = 0; inst < spec.instances; ++inst) {
        const auto s = random_conv(params, spec.bit_wid, spec.sparsity, rng);
        const auto expect = conv_oracle(s);
        const auto got = conv2d(engine, s);
        const bool ok = got == expect;
        out.oracle_match = out.oracle_match && ok;
        nlohmann::json run{{"match", ok}, {"output", to_json(got.output)}, {"pre_activation", to_json(got.pre_activation)}};
        if (got.label) {
            run["class_scores"] = got.class_scores;
            run["class_probs"] = got.class_probs;
            run["label"] = *got.label;
        }
        runs.push_back(std::move(run));
    }
    out.detail = {{"runs", runs}};
    out.log = engine.log();
    out.final_regs = engine.regs();
    return out;
}

}  // namespace abisim::workloads
