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
#include <cmath>

#include "abisim/cost_model.hpp"
#include "abisim/errors.hpp"
#include "abisim/workloads/attention.hpp"
#include "abisim/workloads/conv.hpp"
#include "abisim/workloads/gcn.hpp"
#include "abisim/workloads/ising.hpp"
#include "abisim/workloads/jacobi.hpp"
#include "abisim/workloads/runner.hpp"

namespace abisim::workloads {
namespace {

TEST(Common, SpecRoundTripAndStrictParsing) {
    for (auto t : all_workload_types()) {
        const auto spec = default_spec(t);
        const auto doc = to_json(spec);
        EXPECT_EQ(to_json(workload_spec_from_json(doc)), doc);
        EXPECT_EQ(parse_workload_type(to_string(t)), t);
    }
    auto doc = to_json(default_spec(WorkloadType::Cnn));
    doc["surprise"] = 1;
    EXPECT_THROW((void)workload_spec_from_json(doc), SchemaError);
    doc = to_json(default_spec(WorkloadType::Cnn));
    doc["sparsity"] = 1.5;
    EXPECT_THROW((void)workload_spec_from_json(doc), SchemaError);
    doc = to_json(default_spec(WorkloadType::Cnn));
    doc["mode"]["level"] = "l3";
    EXPECT_THROW((void)workload_spec_from_json(doc), SchemaError);
    EXPECT_THROW((void)parse_workload_type("mlp"), SchemaError);

    auto spec = default_spec(WorkloadType::Gcn);
    spec.dims["unknown_dim"] = 3;
    EXPECT_THROW((void)run_workload(spec), SchemaError);
}

TEST(Common, BitsForAndTiles) {
    EXPECT_EQ(bits_for(std::vector<std::int64_t>{0}), 1);
    EXPECT_EQ(bits_for(std::vector<std::int64_t>{1, -1}), 1);
    EXPECT_EQ(bits_for(std::vector<std::int64_t>{2}), 2);
    EXPECT_EQ(bits_for(std::vector<std::int64_t>{-15}), 4);
    EXPECT_EQ(bits_for(std::vector<std::int64_t>{16}), 5);
    const std::vector<std::int64_t> v{1, 2, 3};
    EXPECT_EQ(tile(v, 2, 3), (std::vector<std::int64_t>{3, 0, 0}));
    EXPECT_EQ(ceil_div(9, 8), 2u);
}

TEST(Conv, EngineMatchesOracle) {
    Rng rng(41);
    for (int bw : {1, 2, 4}) {
        for (int trial = 0; trial < 20; ++trial) {
            ConvParams p;
            p.stride = trial % 2 == 0 ? 1 : 2;
            p.relu = trial % 3 != 0;
            const auto spec = random_conv(p, bw, 0.3, rng);
            auto engine = make_engine(ExecMode{}, bw, conv_rows(spec, 8));
            EXPECT_EQ(conv2d(engine, spec), conv_oracle(spec)) << "bw " << bw << " trial " << trial;
        }
    }
}

TEST(Conv, OracleHandComputed) {
    ConvSpec s;
    s.input = Matrix(3, 3);
    for (std::size_t i = 0; i < 9; ++i) s.input.data[i] = static_cast<std::int64_t>(i) - 4;
    s.kernel = Matrix(2, 2);
    s.kernel.data = {1, 0, 0, -1};
    s.relu = true;
    const auto r = conv_oracle(s);
    // out(r,c) = in(r,c) - in(r+1,c+1) = -4 everywhere
    EXPECT_EQ(r.pre_activation.data, (std::vector<std::int64_t>{-4, -4, -4, -4}));
    EXPECT_EQ(r.output.data, (std::vector<std::int64_t>{0, 0, 0, 0}));
    EXPECT_FALSE(r.label.has_value());
    s.kernel = Matrix(4, 4);
    EXPECT_THROW(s.validate(), SchemaError);
}

TEST(Gcn, EngineMatchesOracle) {
    Rng rng(42);
    for (double sp : {0.0, 0.5, 0.9}) {
        for (int trial = 0; trial < 15; ++trial) {
            const auto spec = random_gcn(GcnParams{}, 2, sp, rng);
            auto engine = make_engine(ExecMode{}, 2, gcn_rows(spec, 8));
            EXPECT_EQ(gcn_layer(engine, spec), gcn_oracle(spec));
        }
    }
}

TEST(Gcn, DegreeIncludesSelfLoop) {
    Rng rng(43);
    const auto spec = random_gcn(GcnParams{}, 2, 1.0, rng);
    for (std::size_t i = 0; i < spec.nodes(); ++i) EXPECT_EQ(spec.degree(i), 1);
}

TEST(Attention, EngineMatchesOracle) {
    Rng rng(44);
    for (auto scaling : {AttnScale::D, AttnScale::SqrtD}) {
        for (int trial = 0; trial < 15; ++trial) {
            AttnParams p;
            p.scaling = scaling;
            const auto spec = random_attn(p, 2, 0.2, rng);
            auto engine = make_engine(ExecMode{}, 2, attn_rows(spec, 8));
            EXPECT_EQ(attention_head(engine, spec), attn_oracle(spec));
        }
    }
}

TEST(Attention, Divisor) {
    AttnSpec s;
    s.q = Matrix(1, 9);
    s.k = Matrix(2, 9);
    s.v = Matrix(2, 1);
    EXPECT_EQ(s.divisor(), 9);
    s.scaling = AttnScale::SqrtD;
    EXPECT_EQ(s.divisor(), 3);
    s.v = Matrix(3, 1);
    EXPECT_THROW(s.validate(), SchemaError);
}

TEST(Jacobi, EngineStepMatchesOracleAndConverges) {
    Rng rng(45);
    for (std::size_t n : {4u, 8u, 32u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto sys = random_system(n, 4, 0.2, rng);
            EXPECT_NO_THROW(sys.validate());
            auto engine = make_engine(ExecMode{}, 4, jacobi_rows(n, 8));
            jacobi_load(engine, sys);
            EXPECT_EQ(jacobi_step(engine, sys, sys.x0), jacobi_step_oracle(sys, sys.x0));
            auto engine2 = make_engine(ExecMode{}, 4, jacobi_rows(n, 8));
            jacobi_load(engine2, sys);
            const auto run = jacobi_solve(engine2, sys, 30);
            EXPECT_TRUE(run.steps_match);
            const auto ref = jacobi_float_solution(sys);
            for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ref[i], static_cast<double>(sys.x_true[i]), 1e-6);
            EXPECT_LE(run.max_error, 2.0);
        }
    }
}

TEST(Jacobi, RejectsNonDominantSystems) {
    LinearSystem s;
    s.a = Matrix(2, 2);
    s.a.data = {1, 1, 1, 3};
    s.b = {0, 0};
    EXPECT_THROW(s.validate(), SchemaError);
}

TEST(Ising, KingsGraph) {
    const auto g = kings_graph(3, 3);
    EXPECT_EQ(g[4].size(), 8u);
    EXPECT_EQ(g[0], (std::vector<std::size_t>{1, 3, 4}));
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (auto j : g[i]) EXPECT_NE(std::find(g[j].begin(), g[j].end(), i), g[j].end());
    }
}

TEST(Ising, LocalFieldsMatchOracle) {
    Rng rng(46);
    for (std::int64_t jmax : {1, 3, 7}) {
        auto m = random_ising(4, 4, jmax, rng);
        auto engine = make_engine(ExecMode{}, bits_for(m.j.data), ising_rows(m, 8));
        set_bit_wid(engine, bits_for(m.j.data));
        ising_load(engine, m);
        for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(ising_local_field(engine, m, i), local_field_oracle(m, i));
    }
}

// Property: sequential sign updates never raise the energy.
TEST(Ising, AnnealingIsEnergyMonotone) {
    Rng rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_ising(4, 4, 1, rng);
        IsingParams p;
        p.max_sweeps = 10;
        auto engine = make_engine(ExecMode{}, 1, ising_rows(m, 8));
        ising_load(engine, m);
        const auto run = ising_anneal(engine, m, p, 1);
        EXPECT_TRUE(run.fields_match);
        EXPECT_TRUE(run.l1_match);
        EXPECT_TRUE(run.energy_monotone);
        for (std::size_t k = 1; k < run.energy_trace.size(); ++k) {
            EXPECT_LE(run.energy_trace[k], run.energy_trace[k - 1]);
        }
        if (run.converged) {
            EXPECT_EQ(run.l1_norms.back(), 0);
        }
    }
}

TEST(Ising, FerromagnetGroundState) {
    auto m = uniform_ising(3, 3, 1, -1);
    EXPECT_EQ(energy_oracle(m), -20);  // 20 King's-graph edges on 3x3
    EXPECT_EQ(sweep_oracle(m), 0);
}

TEST(Runner, EveryDefaultWorkloadMatchesItsOracle) {
    for (auto t : all_workload_types()) {
        const auto out = run_workload(default_spec(t));
        EXPECT_TRUE(out.oracle_match) << to_string(t) << ": " << out.detail.dump();
        EXPECT_GT(out.log.ops().size(), 0u);
    }
}

TEST(Runner, BenchIsDeterministicAndConsistent) {
    const auto table = default_cost_table();
    for (auto t : all_workload_types()) {
        const auto spec = default_spec(t);
        const auto a = bench_workload(spec, table);
        const auto b = bench_workload(spec, table);
        EXPECT_EQ(to_json(a, spec), to_json(b, spec));
        EXPECT_GT(a.ratios.speedup_abi, 1.0);
        EXPECT_GE(a.ratios.speedup_base_plus_abi, a.ratios.speedup_abi * 0.99);
    }
}

TEST(Runner, SparsityMakesGcnCheaper) {
    const auto table = default_cost_table();
    EXPECT_GT(sparsity_savings_ratio(table, 0.7), 1.0);
    EXPECT_GT(sparsity_savings_ratio(table, 0.7), sparsity_savings_ratio(table, 0.2));
}

TEST(Runner, ShippedCalibrationPassesEveryBand) {
    const auto report = calibrate_check(default_cost_table());
    for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.name << " = " << c.value;
    EXPECT_TRUE(report.all_pass());
    EXPECT_EQ(report.checks.size(), 14u);
}

TEST(Sweep, GridOrderingAndThreadIndependence) {
    const auto base = default_spec(WorkloadType::Gcn);
    const auto grid = sweep_grid(base, {3, 1}, {2, 1}, {0.0, 0.5});
    ASSERT_EQ(grid.size(), 8u);
    const auto table = default_cost_table();
    const auto serial = run_sweep(grid, table, 1);
    const auto parallel = run_sweep(grid, table, 3);
    ASSERT_EQ(serial.size(), grid.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(to_json(serial[i]), to_json(parallel[i]));
        EXPECT_TRUE(serial[i].oracle_match);
        if (i > 0) {
            EXPECT_LT(serial[i - 1].run_id, serial[i].run_id);
        }
    }
}

}  // namespace
}  // namespace abisim::workloads
