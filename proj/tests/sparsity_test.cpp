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

#include "abisim/rng.hpp"
#include "abisim/sparsity.hpp"
#include "support/oracles.hpp"

namespace abisim {
namespace {

using testing::dot_engine;
using testing::words;

TEST(Detect, FiresOnAZeroOperand) {
    const auto mem = words(std::vector<std::int64_t>{0, 1, 2, 0});
    const auto reg = words(std::vector<std::int64_t>{1, 0, 3, 0});
    EventLog log;
    EXPECT_EQ(detect(mem, reg, true, &log), (std::vector<bool>{true, true, false, true}));
    EXPECT_EQ(log.count(EventClass::SpDetect), 4u);
    EventLog off;
    EXPECT_EQ(detect(mem, reg, false, &off), (std::vector<bool>(4, false)));
    EXPECT_EQ(off.count(EventClass::SpDetect), 0u);
}

TEST(GateEffect, ClearsSt1ToSt3OfFiredBanks) {
    std::vector<BankStageEvents> ev(2, BankStageEvents{4, 4, 2, 1, 1});
    gate_effect({true, false}, ev);
    EXPECT_EQ(ev[0], (BankStageEvents{4, 0, 0, 0, 1}));
    EXPECT_EQ(ev[1], (BankStageEvents{4, 4, 2, 1, 1}));
}

// Invariant: sp_cnt <= cycle_in_window <= window at every step.
TEST(Monitor, InvariantHoldsOnRandomStreams) {
    Rng rng(31);
    for (std::uint32_t window : {1u, 7u, 64u, 512u}) {
        auto m = SparsityMonitor::armed(window, true);
        for (int i = 0; i < 3000; ++i) {
            m = monitor_step(m, rng.bernoulli(0.02));
            ASSERT_TRUE(m.valid());
        }
    }
}

TEST(Monitor, ShutsDownExactlyAtTheWindowBoundary) {
    for (std::uint32_t window : {7u, 512u}) {
        auto m = SparsityMonitor::armed(window, true);
        for (std::uint32_t i = 1; i < window; ++i) {
            m = monitor_step(m, false);
            ASSERT_TRUE(m.detector_on) << "step " << i;
        }
        m = monitor_step(m, false);
        EXPECT_FALSE(m.detector_on);
        ASSERT_TRUE(m.shutdown_cycle.has_value());
        EXPECT_EQ(*m.shutdown_cycle, window);
        EXPECT_EQ(m.windows_elapsed, 1u);
        const auto frozen = monitor_step(m, true);
        EXPECT_EQ(frozen, m);
    }
}

TEST(Monitor, OneEventPerWindowKeepsItAlive) {
    auto m = SparsityMonitor::armed(7, true);
    for (int w = 0; w < 20; ++w) {
        for (int i = 0; i < 7; ++i) m = monitor_step(m, i == 3);
        EXPECT_TRUE(m.detector_on);
    }
    EXPECT_EQ(m.windows_elapsed, 20u);
}

TEST(Monitor, DisarmedMonitorDoesNothing) {
    const auto m = SparsityMonitor::armed(7, false);
    EXPECT_EQ(monitor_step(m, true), m);
}

// Transparency: gating never changes a numeric result.
TEST(Fused, SparsityGatingIsNumericallyTransparent) {
    Rng rng(32);
    for (const auto& mode : testing::all_modes()) {
        auto on = dot_engine(8, 4, mode);
        auto off = dot_engine(8, 4, mode);
        on.prset("sp_act", 1);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::int64_t> mem(8);
            std::vector<std::int64_t> reg(8);
            for (auto& v : mem) v = rng.bernoulli(0.5) ? 0 : rng.uniform_int(-15, 15);
            for (auto& v : reg) v = rng.bernoulli(0.3) ? 0 : rng.uniform_int(-15, 15);
            const auto& a = testing::engine_dot(on, mem, reg);
            const auto& b = testing::engine_dot(off, mem, reg);
            ASSERT_EQ(a.raw_sum, b.raw_sum);
            ASSERT_EQ(a.per_bank, b.per_bank);
            ASSERT_EQ(a.th_out, b.th_out);
        }
    }
}

TEST(Fused, GatingRemovesStageEvents) {
    auto e = dot_engine(4, 4, {BitMode::Parallel, ElemMode::Parallel});
    e.prset("sp_act", 1);
    const auto& r = testing::engine_dot(e, std::vector<std::int64_t>{0, 0, 3, 3}, std::vector<std::int64_t>{1, 1, 1, 1});
    EXPECT_EQ(r.sp_en, (std::vector<bool>{true, true, false, false}));
    EXPECT_EQ(r.events[static_cast<std::size_t>(EventClass::St1Shift)], 2u * 16u);
    EXPECT_EQ(r.events[static_cast<std::size_t>(EventClass::St0And)], 4u * 16u);
    EXPECT_EQ(r.events[static_cast<std::size_t>(EventClass::SpDetect)], 4u);
}

TEST(Engine, DenseStreamShutsTheDetectorDown) {
    auto e = dot_engine(2, 4, {BitMode::Parallel, ElemMode::Parallel});
    e.prset("sp_window", 7);
    e.prset("sp_act", 1);
    e.preload_row(MemLevel::RF, 0, words(std::vector<std::int64_t>{1, 2}));
    e.load_reg_vector(words(std::vector<std::int64_t>{3, 4}));
    for (int i = 0; i < 6; ++i) (void)e.vmacrt(0);
    EXPECT_TRUE(e.monitor().detector_on);
    (void)e.vmacrt(0);
    EXPECT_FALSE(e.monitor().detector_on);
    EXPECT_EQ(e.monitor().shutdown_cycle, 7u);
    const auto before = e.log().count(EventClass::SpDetect);
    (void)e.vmacrt(0);
    EXPECT_EQ(e.log().count(EventClass::SpDetect), before);
    // Rewriting SP_ACT re-arms it.
    e.prset("sp_act", 1);
    EXPECT_TRUE(e.monitor().detector_on);
}

}  // namespace
}  // namespace abisim
