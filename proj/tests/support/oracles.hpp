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

// Reference models and engine drivers shared by the unit and acceptance tests.

#include <cstdint>
#include <span>
#include <vector>

#include "abisim/engine.hpp"
#include "abisim/prog_regs.hpp"
#include "abisim/word.hpp"

namespace abisim::testing {

/// Exact integer dot product.
inline std::int64_t dot_oracle(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct ModeCase {
    BitMode bit_mode;
    ElemMode elem_mode;
};

inline const std::vector<ModeCase>& all_modes() {
    static const std::vector<ModeCase> modes{{BitMode::Parallel, ElemMode::Parallel},
                                             {BitMode::Parallel, ElemMode::Serial},
                                             {BitMode::Serial, ElemMode::Parallel},
                                             {BitMode::Serial, ElemMode::Serial}};
    return modes;
}

/// Engine with `banks` banks programmed for a plain dot product at `bit_wid`.
inline Engine dot_engine(std::size_t banks, int bit_wid, ModeCase mode, MemLevel level = MemLevel::RF) {
    EngineConfig cfg;
    cfg.banks = banks;
    Engine e(cfg);
    e.prset("nrf_m", static_cast<std::int64_t>(level));
    e.prset("bit_mode", mode.bit_mode == BitMode::Serial ? 1 : 0);
    e.prset("elem_mode", mode.elem_mode == ElemMode::Serial ? 1 : 0);
    e.prset("bit_wid", bit_wid);
    if (bit_wid == 1) e.prset("dis_st1", 1);
    return e;
}

inline std::vector<Word> words(std::span<const std::int64_t> values) {
    std::vector<Word> out;
    out.reserve(values.size());
    for (auto v : values) out.push_back(Word::make(static_cast<std::int32_t>(v)));
    return out;
}

/// One fused op of `mem` against `reg` on a fresh row 0.
inline const RceResult& engine_dot(Engine& e, std::span<const std::int64_t> mem, std::span<const std::int64_t> reg) {
    e.preload_row(e.regs().nrf_m, 0, words(mem));
    e.load_reg_vector(words(reg));
    return e.vmacrt(0);
}

}  // namespace abisim::testing
