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

#include "abisim/workloads/common.hpp"

#include <algorithm>
#include <array>

#include "abisim/errors.hpp"
#include "abisim/lwsm.hpp"

namespace abisim::workloads {

namespace {

constexpr std::array<std::string_view, 5> kTypeNames{"cnn", "ising", "lp", "gcn", "attn"};

std::string level_name(MemLevel l) { return std::string(to_string(l)); }

ExecMode exec_mode_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("mode must be an object");
    ExecMode m;
    for (const auto& [key, value] : doc.items()) {
        if (key == "level") {
            if (!value.is_string()) throw SchemaError("mode.level must be a string");
            auto l = parse_level(value.get<std::string>());
            if (!l) throw SchemaError("unknown level '" + value.get<std::string>() + "'");
            m.level = *l;
        } else if (key == "bit_mode") {
            const auto s = value.is_string() ? value.get<std::string>() : std::string();
            if (s == "BP") m.bit_mode = BitMode::Parallel;
            else if (s == "BS") m.bit_mode = BitMode::Serial;
            else throw SchemaError("mode.bit_mode must be \"BP\" or \"BS\"");
        } else if (key == "elem_mode") {
            const auto s = value.is_string() ? value.get<std::string>() : std::string();
            if (s == "EP") m.elem_mode = ElemMode::Parallel;
            else if (s == "ES") m.elem_mode = ElemMode::Serial;
            else throw SchemaError("mode.elem_mode must be \"EP\" or \"ES\"");
        } else if (key == "sp_act") {
            if (!value.is_boolean()) throw SchemaError("mode.sp_act must be a boolean");
            m.sp_act = value.get<bool>();
        } else if (key == "sp_window") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 1 ||
                value.get<std::int64_t>() > ProgRegs::kMaxWindow) {
                throw SchemaError("mode.sp_window must be an integer in [1,65536]");
            }
            m.sp_window = value.get<std::uint32_t>();
        } else if (key == "banks") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 1 || value.get<std::int64_t>() > 64) {
                throw SchemaError("mode.banks must be an integer in [1,64]");
            }
            m.banks = value.get<std::size_t>();
        } else {
            throw SchemaError("unknown mode key '" + key + "'");
        }
    }
    return m;
}

}  // namespace

std::string_view to_string(WorkloadType t) noexcept { return kTypeNames[static_cast<std::size_t>(t)]; }

WorkloadType parse_workload_type(std::string_view name) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) return static_cast<WorkloadType>(i);
    }
    throw SchemaError("unknown workload type '" + std::string(name) + "'");
}

const std::vector<WorkloadType>& all_workload_types() noexcept {
    static const std::vector<WorkloadType> all{WorkloadType::Cnn, WorkloadType::Ising, WorkloadType::Lp,
                                               WorkloadType::Gcn, WorkloadType::Attn};
    return all;
}

WorkloadSpec workload_spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("workload spec must be a JSON object");
    if (!doc.contains("type")) throw SchemaError("workload spec needs a type");
    WorkloadSpec s;
    for (const auto& [key, value] : doc.items()) {
        if (key == "type") {
            if (!value.is_string()) throw SchemaError("type must be a string");
            s.type = parse_workload_type(value.get<std::string>());
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) throw SchemaError("seed must be a non-negative integer");
            s.seed = value.get<std::uint64_t>();
        } else if (key == "bit_wid") {
            if (!value.is_number_integer() || value.get<int>() < 1 || value.get<int>() > 15) {
                throw SchemaError("bit_wid must be an integer in [1,15]");
            }
            s.bit_wid = value.get<int>();
        } else if (key == "sparsity") {
            if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0) {
                throw SchemaError("sparsity must be a number in [0,1]");
            }
            s.sparsity = value.get<double>();
        } else if (key == "mode") {
            s.mode = exec_mode_from_json(value);
        } else if (key == "instances") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
                throw SchemaError("instances must be a positive integer");
            }
            s.instances = value.get<std::size_t>();
        } else if (key == "dims") {
            if (!value.is_object()) throw SchemaError("dims must be an object");
            s.dims = value;
        } else if (key == "schedule") {
            if (!value.is_object()) throw SchemaError("schedule must be an object");
            s.schedule = value;
        } else if (key == "description") {
            if (!value.is_string()) throw SchemaError("description must be a string");
        } else {
            throw SchemaError("unknown workload spec key '" + key + "'");
        }
    }
    return s;
}

nlohmann::json to_json(const WorkloadSpec& s) {
    return nlohmann::json{
        {"type", std::string(to_string(s.type))},
        {"seed", s.seed},
        {"bit_wid", s.bit_wid},
        {"sparsity", s.sparsity},
        {"mode",
         {{"level", level_name(s.mode.level)},
          {"bit_mode", s.mode.bit_mode == BitMode::Serial ? "BS" : "BP"},
          {"elem_mode", s.mode.elem_mode == ElemMode::Serial ? "ES" : "EP"},
          {"sp_act", s.mode.sp_act},
          {"sp_window", s.mode.sp_window},
          {"banks", s.mode.banks}}},
        {"instances", s.instances},
        {"dims", s.dims},
        {"schedule", s.schedule}};
}

WorkloadSpec default_spec(WorkloadType type) {
    WorkloadSpec s;
    s.type = type;
    s.seed = 1;
    s.mode.sp_act = true;
    switch (type) {
        case WorkloadType::Cnn:
            s.bit_wid = 4;
            s.sparsity = 0.3;
            s.dims = {{"h", 6}, {"w", 6}, {"k", 3}, {"classes", 4}};
            break;
        case WorkloadType::Ising:
            s.bit_wid = 2;
            s.sparsity = 0.0;
            s.mode.sp_act = false;
            s.dims = {{"rows", 4}, {"cols", 4}};
            s.schedule = {{"max_sweeps", 8}, {"l1_bit_wid", 1}};
            break;
        case WorkloadType::Lp:
            s.bit_wid = 8;
            s.dims = {{"n", 8}};
            s.schedule = {{"iterations", 12}};
            break;
        case WorkloadType::Gcn:
            s.bit_wid = 4;
            s.sparsity = 0.7;
            s.dims = {{"nodes", 8}, {"features", 8}, {"channels", 4}};
            break;
        case WorkloadType::Attn:
            s.bit_wid = 4;
            s.sparsity = 0.3;
            s.dims = {{"queries", 4}, {"keys", 8}, {"d", 8}, {"dv", 4}};
            break;
    }
    return s;
}

Engine make_engine(const ExecMode& mode, int bit_wid, std::size_t rows) {
    EngineConfig cfg;
    cfg.banks = mode.banks;
    auto& cap = cfg.capacities[static_cast<std::size_t>(mode.level)];
    cap = std::max(cap, rows);
    Engine engine(cfg);
    engine.prset("nrf_m", static_cast<std::int64_t>(mode.level));
    if (mode.bit_mode == BitMode::Serial) engine.prset("bit_mode", 1);
    if (mode.elem_mode == ElemMode::Serial) engine.prset("elem_mode", 1);
    if (mode.sp_window != engine.regs().sp_window) engine.prset("sp_window", mode.sp_window);
    if (mode.sp_act) engine.prset("sp_act", 1);
    set_bit_wid(engine, bit_wid);
    return engine;
}

void set_bit_wid(Engine& engine, int bit_wid) {
    if (engine.regs().bit_wid != bit_wid) engine.prset("bit_wid", bit_wid);
    const bool st1_off = bit_wid == 1;
    if (engine.regs().dis_stage.contains(Stage::St1) != st1_off) engine.prset("dis_st1", st1_off ? 1 : 0);
}

void program_th(Engine& engine, ThMode mode) {
    const auto& pr = engine.regs();
    const bool want_th = mode == ThMode::Relu;
    const bool want_sm = mode == ThMode::Softmax;
    // Clear before set: th_act and sm_act are mutually exclusive.
    if (pr.th_act && !want_th) engine.prset("th_act", 0);
    if (pr.sm_act && !want_sm) engine.prset("sm_act", 0);
    if (want_th && !engine.regs().th_act) engine.prset("th_act", 1);
    if (want_sm && !engine.regs().sm_act) engine.prset("sm_act", 1);
    const bool th_off = mode == ThMode::Bypass;
    if (engine.regs().dis_stage.contains(Stage::TH) != th_off) engine.prset("dis_th", th_off ? 1 : 0);
}

void set_scaler(Engine& engine, bool on) {
    if (engine.regs().enabled(Stage::S) != on) engine.prset("dis_s", on ? 0 : 1);
}

void preload_tiled(Engine& engine, std::size_t first_row, std::span<const std::int64_t> values) {
    const auto banks = engine.banks();
    const auto level = engine.regs().nrf_m;
    for (std::size_t t = 0; t < ceil_div(values.size(), banks); ++t) {
        engine.preload_row(level, first_row + t, to_words(tile(values, t * banks, banks)));
    }
}

const RceResult& tiled_dot(Engine& engine, std::size_t first_row, std::span<const std::int64_t> reg_values,
                           bool reload) {
    const auto banks = engine.banks();
    const auto tiles = ceil_div(reg_values.size(), banks);
    if (tiles == 0) throw EmptyValueError("dot product of an empty vector");
    const RceResult* res = nullptr;
    for (std::size_t t = 0; t < tiles; ++t) {
        if (reload || tiles > 1) engine.load_reg_vector(to_words(tile(reg_values, t * banks, banks)));
        FusedOptions opt;
        opt.partial = t + 1 < tiles;
        opt.chained = t > 0;
        res = &engine.vmacrt(first_row + t, opt);
    }
    return *res;
}

std::vector<Word> to_words(std::span<const std::int64_t> values) {
    std::vector<Word> out;
    out.reserve(values.size());
    for (auto v : values) {
        if (!Word::representable(v, Word::kMaxWidth)) {
            throw RangeError("value " + std::to_string(v) + " does not fit a 16-bit word");
        }
        out.push_back(Word::make(static_cast<std::int32_t>(v)));
    }
    return out;
}

std::vector<std::int64_t> tile(std::span<const std::int64_t> values, std::size_t begin, std::size_t len) {
    std::vector<std::int64_t> out(len, 0);
    for (std::size_t i = 0; i < len && begin + i < values.size(); ++i) out[i] = values[begin + i];
    return out;
}

std::int64_t sparse_value(Rng& rng, std::int64_t max_mag, double sparsity) {
    if (rng.bernoulli(sparsity)) return 0;
    return rng.uniform_int(-max_mag, max_mag);
}

int bits_for(std::span<const std::int64_t> values) noexcept {
    int bits = 1;
    for (auto v : values) {
        const auto mag = static_cast<std::uint64_t>(v < 0 ? -v : v);
        while (bits < 16 && mag >= (std::uint64_t{1} << bits)) ++bits;
    }
    return bits;
}

std::vector<std::int64_t> Matrix::column(std::size_t c) const {
    std::vector<std::int64_t> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
    return out;
}

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        auto row = m.row(r);
        out.push_back(std::vector<std::int64_t>(row.begin(), row.end()));
    }
    return out;
}

std::vector<std::int64_t> lwsm_reference(std::span<const std::int64_t> scores, int frac_bits) {
    const auto raw = normalize_scores(scores, frac_bits);
    const auto res = lwsm(std::span<const std::uint32_t>(raw));
    std::vector<std::int64_t> out;
    out.reserve(res.shifts.size());
    for (int s : res.shifts) out.push_back(prob_fixed(s, frac_bits));
    return out;
}

ParamReader::ParamReader(const nlohmann::json& obj, std::string section) : obj_(obj), section_(std::move(section)) {
    if (!obj_.is_object()) throw SchemaError(section_ + " must be an object");
}

std::int64_t ParamReader::get_int(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
    used_.push_back(key);
    if (!obj_.contains(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < lo || v.get<std::int64_t>() > hi) {
        throw SchemaError(section_ + "." + key + " must be an integer in [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "]");
    }
    return v.get<std::int64_t>();
}

bool ParamReader::get_bool(const std::string& key, bool fallback) {
    used_.push_back(key);
    if (!obj_.contains(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw SchemaError(section_ + "." + key + " must be a boolean");
    return v.get<bool>();
}

std::string ParamReader::get_string(const std::string& key, const std::string& fallback) {
    used_.push_back(key);
    if (!obj_.contains(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw SchemaError(section_ + "." + key + " must be a string");
    return v.get<std::string>();
}

void ParamReader::finish() const {
    for (const auto& [key, value] : obj_.items()) {
        if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
            throw SchemaError("unknown " + section_ + " key '" + key + "'");
        }
    }
}

}  // namespace abisim::workloads
