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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "abisim/engine_config.hpp"
#include "abisim/errors.hpp"
#include "abisim/prog_regs.hpp"
#include "abisim/word.hpp"

namespace abisim {
namespace {

TEST(Word, TwosComplementRoundTripsEveryWidth) {
    for (int width = 2; width <= Word::kMaxWidth; ++width) {
        const std::int32_t lo = -(1 << (width - 1));
        const std::int32_t hi = (1 << (width - 1)) - 1;
        for (std::int32_t v : {lo, lo + 1, -1, 0, 1, hi - 1, hi}) {
            const Word w = Word::make(v, width);
            EXPECT_EQ(w.value(), v) << "width " << width;
            EXPECT_EQ(w.width(), width);
            EXPECT_LT(w.raw(), 1u << width);
        }
        EXPECT_THROW((void)Word::make(hi + 1, width), RangeError);
        EXPECT_THROW((void)Word::make(lo - 1, width), RangeError);
    }
}

TEST(Word, OneBitEncodings) {
    EXPECT_EQ(Word::make(0, 1).value(), 0);
    EXPECT_EQ(Word::make(1, 1).value(), 1);
    EXPECT_EQ(Word::make(1, 1).encoding(), Encoding::Binary);
    EXPECT_THROW((void)Word::make(-1, 1), RangeError);

    EXPECT_EQ(Word::spin(-1).value(), -1);
    EXPECT_EQ(Word::spin(1).value(), 1);
    EXPECT_EQ(Word::spin(-1).raw(), 0);
    EXPECT_EQ(Word::spin(1).raw(), 1);
    EXPECT_EQ(Word::spin(1).encoding(), Encoding::Spin);
    EXPECT_THROW((void)Word::spin(0), RangeError);
}

TEST(Word, RejectsBadWidths) {
    EXPECT_FALSE(Word::representable(0, 0));
    EXPECT_FALSE(Word::representable(0, 17));
    EXPECT_THROW((void)Word::make(0, 0), RangeError);
}

TEST(ProgRegs, DefaultsArePlainMultiplyReduce) {
    const ProgRegs pr;
    EXPECT_NO_THROW(pr.validate());
    EXPECT_EQ(pr.bit_wid, 8);
    EXPECT_EQ(pr.bit_mode, BitMode::Parallel);
    EXPECT_EQ(pr.elem_mode, ElemMode::Parallel);
    EXPECT_FALSE(pr.enabled(Stage::St2));
    EXPECT_FALSE(pr.enabled(Stage::St4));
    EXPECT_FALSE(pr.enabled(Stage::S));
    EXPECT_FALSE(pr.enabled(Stage::TH));
    EXPECT_TRUE(pr.enabled(Stage::CA));
    EXPECT_EQ(pr.th_mode(), ThMode::Bypass);
    EXPECT_EQ(pr.sp_window, 512u);
}

TEST(ProgRegs, ThModeFollowsActivationFlags) {
    ProgRegs pr = set_prog_reg(ProgRegs{}, "dis_th", 0);
    EXPECT_EQ(pr.th_mode(), ThMode::Compare);
    pr = set_prog_reg(pr, "th_act", 1);
    EXPECT_EQ(pr.th_mode(), ThMode::Relu);
    pr = set_prog_reg(set_prog_reg(pr, "th_act", 0), "sm_act", 1);
    EXPECT_EQ(pr.th_mode(), ThMode::Softmax);
    EXPECT_THROW((void)set_prog_reg(pr, "th_act", 1), ConfigError);
}

TEST(ProgRegs, BitModeTogglesSt2) {
    ProgRegs pr = set_prog_reg(ProgRegs{}, "bit_mode", 1);
    EXPECT_EQ(pr.bit_mode, BitMode::Serial);
    EXPECT_TRUE(pr.enabled(Stage::St2));
    pr = set_prog_reg(pr, "bit_mode", 0);
    EXPECT_FALSE(pr.enabled(Stage::St2));
    EXPECT_THROW((void)set_prog_reg(pr, "dis_st2", 0), ConfigError);

    pr = set_prog_reg(pr, "bit_elser", 3);
    EXPECT_EQ(pr.bit_mode, BitMode::Serial);
    EXPECT_EQ(pr.elem_mode, ElemMode::Serial);
    EXPECT_EQ(get_prog_reg(pr, "bit_elser"), 3);
}

TEST(ProgRegs, EveryFieldReadsBackWhatWasWritten) {
    const ProgRegs base = set_prog_reg(ProgRegs{}, "bit_mode", 1);
    for (auto field : prog_reg_fields()) {
        const std::int64_t current = get_prog_reg(base, field);
        const ProgRegs same = set_prog_reg(base, field, current);
        EXPECT_EQ(same, base) << field;
    }
    EXPECT_EQ(get_prog_reg(set_prog_reg(base, "bit_wid", 3), "bit_wid"), 3);
    EXPECT_EQ(get_prog_reg(set_prog_reg(base, "nrf_m", 2), "nrf_m"), 2);
    EXPECT_EQ(get_prog_reg(set_prog_reg(base, "sp_window", 7), "sp_window"), 7);
}

TEST(ProgRegs, RangeChecks) {
    const ProgRegs pr;
    EXPECT_THROW((void)set_prog_reg(pr, "bit_wid", 0), RangeError);
    EXPECT_THROW((void)set_prog_reg(pr, "bit_wid", 17), RangeError);
    EXPECT_THROW((void)set_prog_reg(pr, "sp_window", 0), RangeError);
    EXPECT_THROW((void)set_prog_reg(pr, "sp_window", 65537), RangeError);
    EXPECT_THROW((void)set_prog_reg(pr, "nrf_m", 3), RangeError);
    EXPECT_THROW((void)set_prog_reg(pr, "sp_act", 2), RangeError);
    EXPECT_THROW((void)set_prog_reg(pr, "bogus", 1), ConfigError);
    EXPECT_THROW((void)set_prog_reg(pr, "dis_st9", 1), ConfigError);
    EXPECT_THROW((void)get_prog_reg(pr, "bogus"), ConfigError);
}

TEST(EngineConfig, JsonRoundTrip) {
    EngineConfig cfg;
    cfg.banks = 4;
    cfg.capacities = {32, 256, 2048};
    cfg.regs = set_prog_reg(set_prog_reg(cfg.regs, "bit_elser", 2), "bit_wid", 4);
    const auto doc = to_json(cfg);
    EXPECT_EQ(engine_config_from_json(doc), cfg);
}

TEST(EngineConfig, StrictParsing) {
    EXPECT_THROW((void)engine_config_from_json(nlohmann::json{{"bankz", 4}}), SchemaError);
    EXPECT_THROW((void)engine_config_from_json(nlohmann::json{{"nrf_m", "L3"}}), SchemaError);
    EXPECT_THROW((void)engine_config_from_json(nlohmann::json{{"dis_stage", {"st9"}}}), SchemaError);
    EXPECT_THROW((void)engine_config_from_json(nlohmann::json::array()), SchemaError);
    EXPECT_THROW((void)engine_config_from_json(nlohmann::json{{"banks", 0}}), RangeError);
    EXPECT_THROW((void)engine_config_from_json(nlohmann::json{{"bit_wid", 0}}), RangeError);
}

TEST(EngineConfig, ShippedDefaultMatchesBuiltIn) {
    const auto cfg = load_engine_config(std::string(ABISIM_DATA_DIR) + "/engine_default.json");
    EXPECT_EQ(cfg, EngineConfig{});
}

TEST(EngineConfig, MissingFile) {
    EXPECT_THROW((void)load_engine_config("/nonexistent/engine.json"), FileNotFound);
}

}  // namespace
}  // namespace abisim
