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

#include "abisim/engine_config.hpp"

#include <fstream>
#include <sstream>

#include "abisim/errors.hpp"

namespace abisim {

using nlohmann::json;

namespace {

std::int64_t as_int(const json& v, const std::string& key) {
    if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
    if (!v.is_number_integer()) throw SchemaError("key '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::size_t as_size(const json& v, const std::string& key) {
    const auto n = as_int(v, key);
    if (n < 1) throw RangeError("key '" + key + "' must be >= 1");
    return static_cast<std::size_t>(n);
}

}  // namespace

EngineConfig engine_config_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("engine config must be a JSON object");
    EngineConfig cfg;
    ProgRegs regs = cfg.regs;
    std::optional<std::size_t> words_per_bank;

    for (const auto& [key, value] : doc.items()) {
        if (key == "sp_act" || key == "th_act" || key == "sm_act" || key == "bit_wid" ||
            key == "sp_window") {
            regs = set_prog_reg(regs, key, as_int(value, key));
        } else if (key == "nrf_m") {
            if (!value.is_string()) throw SchemaError("nrf_m must be \"RF\", \"L1\" or \"L2\"");
            auto level = parse_level(value.get<std::string>());
            if (!level) throw SchemaError("bad nrf_m " + value.dump());
            regs.nrf_m = *level;
        } else if (key == "bit_elser") {
            if (!value.is_array() || value.size() != 2 || !value[0].is_string() || !value[1].is_string()) {
                throw SchemaError("bit_elser must be [\"BS\"|\"BP\", \"ES\"|\"EP\"]");
            }
            const auto b = value[0].get<std::string>();
            const auto e = value[1].get<std::string>();
            if ((b != "BS" && b != "BP") || (e != "ES" && e != "EP")) {
                throw SchemaError("bad bit_elser " + value.dump());
            }
            regs = set_prog_reg(regs, "bit_elser", (b == "BS" ? 2 : 0) + (e == "ES" ? 1 : 0));
        } else if (key == "dis_stage") {
            if (!value.is_array()) throw SchemaError("dis_stage must be an array of stage names");
            regs.dis_stage = StageSet{};
            for (const auto& s : value) {
                if (!s.is_string()) throw SchemaError("dis_stage entries must be strings");
                auto stage = parse_stage(s.get<std::string>());
                if (!stage) throw SchemaError("unknown stage " + s.dump());
                regs.dis_stage.insert(*stage);
            }
        } else if (key == "banks") {
            cfg.banks = as_size(value, key);
        } else if (key == "words_per_bank") {
            words_per_bank = as_size(value, key);
        } else if (key == "level_capacities") {
            if (!value.is_object()) throw SchemaError("level_capacities must be an object");
            for (const auto& [lk, lv] : value.items()) {
                auto level = parse_level(lk);
                if (!level) throw SchemaError("unknown level '" + lk + "'");
                cfg.capacities[static_cast<std::size_t>(*level)] = as_size(lv, lk);
            }
        } else {
            throw SchemaError("unknown engine config key '" + key + "'");
        }
    }

    if (words_per_bank) {
        const bool rf_given = doc.contains("level_capacities") && doc["level_capacities"].contains("RF");
        if (rf_given && cfg.capacities[0] != *words_per_bank) {
            throw ConfigError("words_per_bank conflicts with level_capacities.RF");
        }
        cfg.capacities[0] = *words_per_bank;
    }
    // dis_stage is applied wholesale, so BP's St2 constraint is restored here.
    if (regs.bit_mode == BitMode::Parallel) regs.dis_stage.insert(Stage::St2);
    regs.validate();
    cfg.regs = regs;
    return cfg;
}

json to_json(const ProgRegs& regs) {
    json stages = json::array();
    for (std::size_t i = 0; i < kNumStages; ++i) {
        const auto s = static_cast<Stage>(i);
        if (regs.dis_stage.contains(s)) stages.push_back(std::string(to_string(s)));
    }
    return json{{"sp_act", regs.sp_act},
                {"th_act", regs.th_act},
                {"sm_act", regs.sm_act},
                {"nrf_m", std::string(to_string(regs.nrf_m))},
                {"bit_elser",
                 json::array({regs.bit_mode == BitMode::Serial ? "BS" : "BP",
                              regs.elem_mode == ElemMode::Serial ? "ES" : "EP"})},
                {"bit_wid", regs.bit_wid},
                {"dis_stage", stages},
                {"sp_window", regs.sp_window}};
}

json to_json(const EngineConfig& cfg) {
    json doc = to_json(cfg.regs);
    doc["banks"] = cfg.banks;
    doc["words_per_bank"] = cfg.capacities[0];
    doc["level_capacities"] = json{{"RF", cfg.capacities[0]}, {"L1", cfg.capacities[1]}, {"L2", cfg.capacities[2]}};
    return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
    return engine_config_from_json(read_json_file(path));
}

}  // namespace abisim
