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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "abisim/cost_model.hpp"
#include "abisim/errors.hpp"
#include "abisim/rng.hpp"
#include "support/oracles.hpp"

namespace abisim {
namespace {

std::size_t idx(EventClass c) { return static_cast<std::size_t>(c); }

OpRecord fused(std::uint16_t banks, std::uint8_t bw = 8) {
    OpRecord op;
    op.kind = OpKind::Fused;
    op.banks = banks;
    op.bit_wid = bw;
    return op;
}

TEST(CostTable, ShippedCalibrationIsTheBuiltInDefault) {
    const auto shipped = load_cost_table(std::string(ABISIM_DATA_DIR) + "/calibration.json");
    EXPECT_EQ(shipped, default_cost_table());
}

TEST(CostTable, JsonRoundTrip) {
    const auto t = default_cost_table();
    EXPECT_EQ(cost_table_from_json(to_json(t)), t);
    auto u = CostTable::unit();
    u.baseline.instr_latency = 2.5;
    u.latency.nm_l2 = 12;
    EXPECT_EQ(cost_table_from_json(to_json(u)), u);
}

TEST(CostTable, StrictParsing) {
    auto doc = to_json(default_cost_table());
    auto missing = doc;
    missing["energy"].erase("ca_add");
    EXPECT_THROW((void)cost_table_from_json(missing), SchemaError);
    auto unknown = doc;
    unknown["energy"]["warp_drive"] = 1.0;
    EXPECT_THROW((void)cost_table_from_json(unknown), SchemaError);
    auto extra = doc;
    extra["colour"] = "blue";
    EXPECT_THROW((void)cost_table_from_json(extra), SchemaError);
    auto negative = doc;
    negative["energy"]["rf_read"] = -1.0;
    EXPECT_THROW((void)cost_table_from_json(negative), SchemaError);
    auto zero_latency = doc;
    zero_latency["latency"]["nrf"] = 0;
    EXPECT_THROW((void)cost_table_from_json(zero_latency), SchemaError);
    EXPECT_THROW((void)load_cost_table("/nonexistent/calibration.json"), FileNotFound);
}

TEST(EventCounts, JsonRoundTripAndValidation) {
    EventCounts c{};
    c[idx(EventClass::CaAdd)] = 7;
    c[idx(EventClass::L2Read)] = 3;
    EXPECT_EQ(event_counts_from_json(event_counts_to_json(c)), c);
    EXPECT_THROW((void)event_counts_from_json(nlohmann::json{{"nope", 1}}), SchemaError);
    EXPECT_THROW((void)event_counts_from_json(nlohmann::json{{"ca_add", -1}}), SchemaError);
}

// Pricing is linear in the counts.
TEST(PriceEvents, IsLinear) {
    Rng rng(41);
    const auto t = default_cost_table();
    for (int trial = 0; trial < 100; ++trial) {
        EventCounts a{};
        EventCounts b{};
        EventCounts sum{};
        for (std::size_t i = 0; i < kNumEventClasses; ++i) {
            a[i] = static_cast<std::uint64_t>(rng.uniform_int(0, 1000));
            b[i] = static_cast<std::uint64_t>(rng.uniform_int(0, 1000));
            sum[i] = a[i] + b[i];
        }
        EXPECT_NEAR(price_events(sum, t), price_events(a, t) + price_events(b, t), 1e-9 * price_events(sum, t));
    }
    EXPECT_EQ(price_events(EventCounts{}, t), 0.0);
}

TEST(CountOps, EightBitEquivalents) {
    EventLog log;
    log.record_op(fused(8, 8));
    log.record_op(fused(8, 2));
    OpRecord red;
    red.kind = OpKind::Reduce;
    red.banks = 4;
    log.record_op(red);
    OpRecord flush;
    flush.kind = OpKind::LwsmFlush;
    flush.elements = 5;
    log.record_op(flush);
    EXPECT_DOUBLE_EQ(count_ops(log), 8.0 + 32.0 + 4.0 + 5.0);
}

TEST(Account, CyclesFollowTheTrace) {
    EventLog log;
    log.record_op(OpRecord{.kind = OpKind::ProgSet});
    log.record_op(OpRecord{.kind = OpKind::Preload});
    log.record_op(OpRecord{.kind = OpKind::LoadReg, .banks = 8});
    auto l2 = fused(8);
    l2.level = MemLevel::L2;
    log.record_op(l2);
    log.record_op(OpRecord{.kind = OpKind::Store});
    log.record_op(OpRecord{.kind = OpKind::LwsmFlush, .elements = 4});
    log.add(EventClass::CaAdd, 8);
    const auto t = default_cost_table();
    const auto r = account(log, ProgRegs{}, t);
    EXPECT_DOUBLE_EQ(r.cycles, 1 + 0 + 1 + 10 + 1 + 5);
    EXPECT_EQ(r.instructions, 5u);
    EXPECT_DOUBLE_EQ(r.energy, 8 * t.price(EventClass::CaAdd));
    EXPECT_EQ(r.variant, "abi");
}

TEST(Baseline, InstructionExpansion) {
    const BaselineParams p;
    auto op = fused(8);
    EXPECT_EQ(baseline_instructions(op, p), 1u + 1u + 7u + 1u);  // load, mac, 7 adds, threshold/move
    op.partial = true;
    EXPECT_EQ(baseline_instructions(op, p), 1u + 1u + 7u);
    op.partial = false;
    op.with_bias = true;
    op.scaler = true;
    EXPECT_EQ(baseline_instructions(op, p), 1u + 1u + 8u + p.div_instrs + 1u);
    auto single = fused(1);
    EXPECT_EQ(baseline_instructions(single, p), 1u + 1u + 1u + 1u);
    OpRecord red;
    red.kind = OpKind::Reduce;
    red.banks = 4;
    EXPECT_EQ(baseline_instructions(red, p), 1u + 3u + 1u);
    EXPECT_EQ(baseline_instructions(OpRecord{.kind = OpKind::LoadReg, .banks = 8}, p), 1u);
    EXPECT_EQ(baseline_instructions(OpRecord{.kind = OpKind::Store}, p), 1u);
    EXPECT_EQ(baseline_instructions(OpRecord{.kind = OpKind::ProgSet}, p), 0u);
    EXPECT_EQ(baseline_instructions(OpRecord{.kind = OpKind::Preload}, p), 0u);
    EXPECT_EQ(baseline_instructions(OpRecord{.kind = OpKind::LwsmFlush, .elements = 3}, p),
              3u * p.softmax_instrs_per_elem);
}

TEST(Baseline, CyclesAreInstructionsTimesLatencyPlusLoadPenalty) {
    auto t = default_cost_table();
    EventLog log;
    auto op = fused(8);
    op.level = MemLevel::L1;
    log.record_op(op);
    log.record_op(op);
    const auto r = simulate_baseline(log, t);
    EXPECT_EQ(r.instructions, 20u);
    EXPECT_DOUBLE_EQ(r.cycles, 20 * t.baseline.instr_latency + 2 * t.baseline.load_extra[1]);
    EXPECT_DOUBLE_EQ(r.events[idx(EventClass::BaseInstrFetchDecode)], 20.0);
    EXPECT_DOUBLE_EQ(r.events[idx(EventClass::L1Read)], 2.0);
}

EventLog random_trace(Rng& rng) {
    EventLog log;
    const auto n = rng.uniform_int(1, 60);
    for (int i = 0; i < n; ++i) {
        OpRecord op;
        switch (rng.uniform_int(0, 5)) {
            case 0: op.kind = OpKind::ProgSet; break;
            case 1: op.kind = OpKind::LoadReg; op.banks = 8; break;
            case 2: op.kind = OpKind::Store; break;
            case 3: op.kind = OpKind::LwsmFlush; op.elements = 4; break;
            default:
                op = fused(static_cast<std::uint16_t>(rng.uniform_int(1, 16)),
                           static_cast<std::uint8_t>(rng.uniform_int(1, 16)));
                op.level = static_cast<MemLevel>(rng.uniform_int(0, 2));
                op.partial = rng.bernoulli(0.3);
                break;
        }
        log.record_op(op);
    }
    log.add(EventClass::CaAdd, 100);
    log.add(EventClass::Write, 20);
    return log;
}

// The parallel model never does worse than running everything on either side.
TEST(BasePlusAbi, SplitIsNoWorseThanEitherExtreme) {
    Rng rng(42);
    const auto t = default_cost_table();
    for (int trial = 0; trial < 300; ++trial) {
        const auto log = random_trace(rng);
        const auto base = simulate_baseline(log, t);
        const auto abi = account(log, ProgRegs{}, t);
        const auto both = simulate_base_plus_abi(log, t);
        ASSERT_TRUE(both.alu_share.has_value());
        EXPECT_GE(*both.alu_share, 0.0);
        EXPECT_LE(*both.alu_share, 1.0);
        // g = 0: register traffic on the ALUs, everything else near memory.
        // g = 1: all work on the ALUs, PR writes near memory.
        EventLog alu_side;
        EventLog nrf_side;
        EventLog prset_only;
        for (const auto& op : log.ops()) {
            const bool aux = op.kind == OpKind::LoadReg || op.kind == OpKind::LoadReg2 || op.kind == OpKind::Store;
            (aux ? alu_side : nrf_side).record_op(op);
            if (op.kind == OpKind::ProgSet) prset_only.record_op(op);
        }
        const double g0 = std::max(simulate_baseline(alu_side, t).cycles, account(nrf_side, ProgRegs{}, t).cycles);
        const double g1 = std::max(base.cycles, account(prset_only, ProgRegs{}, t).cycles);
        EXPECT_LE(both.cycles, g0 + 1e-9);
        EXPECT_LE(both.cycles, g1 + 1e-9);
        EXPECT_GT(abi.cycles, 0.0);
        for (double e : both.events) EXPECT_GE(e, 0.0);
    }
}

TEST(Compare, RatiosAndMismatch) {
    ReportSet s;
    for (auto* r : {&s.base, &s.abi, &s.base_plus_abi}) {
        r->workload = "cnn";
        r->seed = 3;
        r->ops = 100.0;
    }
    s.base.cycles = 100;
    s.base.energy = 50;
    s.abi.cycles = 25;
    s.abi.energy = 10;
    s.base_plus_abi.cycles = 10;
    s.base_plus_abi.energy = 20;
    RunReport off = s.abi;
    off.energy = 15;
    s.abi_sparsity_off = off;
    const auto r = compare(s);
    EXPECT_DOUBLE_EQ(r.speedup_abi, 4.0);
    EXPECT_DOUBLE_EQ(r.speedup_base_plus_abi, 10.0);
    EXPECT_DOUBLE_EQ(r.efficiency_abi, 5.0);
    EXPECT_DOUBLE_EQ(r.efficiency_base_plus_abi, 2.5);
    EXPECT_DOUBLE_EQ(*r.sparsity_savings, 1.5);

    s.abi.seed = 4;
    EXPECT_THROW((void)compare(s), ComparisonError);
    s.abi.seed = 3;
    s.base_plus_abi.workload = "gcn";
    EXPECT_THROW((void)compare(s), ComparisonError);
}

TEST(Csv, HeaderAndRowsAlign) {
    auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
    RunReport r;
    r.workload = "lp";
    r.variant = "abi";
    r.cycles = 12.5;
    EXPECT_EQ(count(csv_header()), count(to_csv_row(r)));
    EXPECT_EQ(count(csv_header()), 8 + static_cast<long>(kNumEventClasses));
}

TEST(FormatNumber, ShortestRoundTrip) {
    Rng rng(43);
    for (int i = 0; i < 1000; ++i) {
        const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform_int(-8, 12));
        const auto s = format_number(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    }
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Account, EngineRunHasEnergyAndOps) {
    auto e = testing::dot_engine(8, 4, {BitMode::Parallel, ElemMode::Parallel});
    const std::vector<std::int64_t> v(8, 2);
    (void)testing::engine_dot(e, v, v);
    (void)e.stout();
    const auto r = account(e.log(), e.regs(), default_cost_table());
    EXPECT_GT(r.energy, 0.0);
    EXPECT_DOUBLE_EQ(r.ops, 16.0);
    // Four PRSETs, one LDR and one STOUT at one cycle each, plus the 2-cycle VMACRT.
    EXPECT_DOUBLE_EQ(r.cycles, 4.0 + 1.0 + 2.0 + 1.0);
}

}  // namespace
}  // namespace abisim
