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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "abisim/prog_regs.hpp"

namespace abisim {

/// Static engine shape plus the register reset state.
struct EngineConfig {
    ProgRegs regs;
    std::size_t banks = 8;
    /// Words per bank for RF, L1, L2.
    std::array<std::size_t, kNumLevels> capacities{64, 1024, 8192};

    [[nodiscard]] std::size_t capacity(MemLevel level) const noexcept {
        return capacities[static_cast<std::size_t>(level)];
    }

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// Strict parse: keys are the ProgRegs field names (sp_act, th_act, sm_act,
/// nrf_m, bit_elser, bit_wid, dis_stage, sp_window) plus banks,
/// words_per_bank and level_capacities. Unknown keys raise SchemaError.
[[nodiscard]] EngineConfig engine_config_from_json(const nlohmann::json& doc);
[[nodiscard]] EngineConfig load_engine_config(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const EngineConfig& cfg);
[[nodiscard]] nlohmann::json to_json(const ProgRegs& regs);

/// Reads a whole file; FileNotFound if it cannot be opened.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace abisim
