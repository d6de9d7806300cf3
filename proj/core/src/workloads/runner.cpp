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

#include "abisim/workloads/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "abisim/engine_config.hpp"
#include "abisim/errors.hpp"
#include "abisim/workloads/attention.hpp"
#include "abisim/workloads/conv.hpp"
#include "abisim/workloads/gcn.hpp"
#include "abisim/workloads/ising.hpp"
#include "abisim/workloads/jacobi.hpp"

namespace abisim::workloads {

namespace {

RunReport abi_report(const WorkloadOutcome& out, const CostTable& table) {
    auto r = account(out.log, out.final_regs, table);
    r.workload = out.workload;
    r.seed = out.seed;
    return r;
}

RunReport tag(RunReport r, const WorkloadOutcome& out) {
    r.workload = out.workload;
    r.seed = out.seed;
    return r;
}

BandCheck band(std::string name, double value, double lo, double hi) {
    return BandCheck{std::move(name), value, lo, hi, value >= lo && value <= hi};
}

WorkloadSpec ising_scenario(int bit_wid, int l1_bit_wid) {
    auto s = default_spec(WorkloadType::Ising);
    s.bit_wid = bit_wid;
    s.instances = 4;
    s.mode.sp_act = false;
    s.schedule = {{"max_sweeps", 8}, {"l1_bit_wid", l1_bit_wid}};
    return s;
}

nlohmann::json scenario_json(const WorkloadSpec& spec, const RunReport& r) {
    return nlohmann::json{{"spec", to_json(spec)}, {"report", to_json(r)}};
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

WorkloadOutcome run_workload(const WorkloadSpec& spec) {
    switch (spec.type) {
        case WorkloadType::Cnn: return run_conv(spec);
        case WorkloadType::Ising: return run_ising(spec);
        case WorkloadType::Lp: return run_jacobi(spec);
        case WorkloadType::Gcn: return run_gcn(spec);
        case WorkloadType::Attn: return run_attention(spec);
    }
    throw SchemaError("unknown workload type");
}

BenchResult bench_workload(const WorkloadSpec& spec, const CostTable& table) {
    BenchResult r;
    r.outcome = run_workload(spec);
    auto off_spec = spec;
    off_spec.mode.sp_act = false;
    const auto off = spec.mode.sp_act ? run_workload(off_spec) : r.outcome;

    r.reports.abi = abi_report(r.outcome, table);
    r.reports.base = tag(simulate_baseline(r.outcome.log, table), r.outcome);
    r.reports.base_plus_abi = tag(simulate_base_plus_abi(r.outcome.log, table), r.outcome);
    // The hybrid still programs the engine; the pure baseline has no PRs.
    r.reports.base_plus_abi.config = r.reports.abi.config;
    auto off_report = abi_report(off, table);
    off_report.variant = "abi_sparsity_off";
    r.reports.abi_sparsity_off = off_report;
    r.ratios = compare(r.reports);
    return r;
}

nlohmann::json to_json(const BenchResult& r, const WorkloadSpec& spec) {
    return nlohmann::json{{"workload", r.outcome.workload},
                          {"seed", r.outcome.seed},
                          {"spec", to_json(spec)},
                          {"oracle_match", r.outcome.oracle_match},
                          {"detail", r.outcome.detail},
                          {"reports",
                           {{"abi", to_json(r.reports.abi)},
                            {"base", to_json(r.reports.base)},
                            {"base_plus_abi", to_json(r.reports.base_plus_abi)},
                            {"abi_sparsity_off", to_json(*r.reports.abi_sparsity_off)}}},
                          {"ratios", to_json(r.ratios)}};
}

bool CalibrationReport::all_pass() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const BandCheck& c) { return c.pass; });
}

namespace {

/// Numerator and denominator runs of one ratio scenario.
struct ScenarioPair {
    WorkloadSpec num_spec;
    WorkloadSpec den_spec;
    RunReport num;
    RunReport den;
};

ScenarioPair run_pair(const WorkloadSpec& num, const WorkloadSpec& den, const CostTable& table) {
    return {num, den, abi_report(run_workload(num), table), abi_report(run_workload(den), table)};
}

ScenarioPair bp_bs_pair(const CostTable& table) {
    auto bp = ising_scenario(1, 1);
    bp.mode.elem_mode = ElemMode::Serial;
    auto bs = bp;
    bs.mode.bit_mode = BitMode::Serial;
    return run_pair(bp, bs, table);
}

ScenarioPair l2_l1_pair(const CostTable& table) {
    auto l1 = default_spec(WorkloadType::Cnn);
    l1.mode.level = MemLevel::L1;
    auto l2 = l1;
    l2.mode.level = MemLevel::L2;
    return run_pair(l2, l1, table);
}

ScenarioPair sparsity_pair(const CostTable& table, double sparsity) {
    auto on = default_spec(WorkloadType::Gcn);
    on.sparsity = sparsity;
    on.mode.sp_act = true;
    auto off = on;
    off.mode.sp_act = false;
    return run_pair(off, on, table);
}

ScenarioPair r3_pair(const CostTable& table) { return run_pair(ising_scenario(4, 4), ising_scenario(4, 1), table); }

double energy_ratio(const ScenarioPair& p) { return p.num.energy / p.den.energy; }

double power_ratio(const ScenarioPair& p) { return (p.num.energy / p.num.cycles) / (p.den.energy / p.den.cycles); }

nlohmann::json pair_json(const ScenarioPair& p) {
    return {{"numerator", scenario_json(p.num_spec, p.num)}, {"denominator", scenario_json(p.den_spec, p.den)}};
}

}  // namespace

double bp_bs_energy_ratio(const CostTable& table) { return energy_ratio(bp_bs_pair(table)); }

double l2_l1_energy_ratio(const CostTable& table) { return energy_ratio(l2_l1_pair(table)); }

double sparsity_savings_ratio(const CostTable& table, double sparsity) {
    return energy_ratio(sparsity_pair(table, sparsity));
}

double r3_power_saving(const CostTable& table) { return power_ratio(r3_pair(table)); }

CalibrationReport calibrate_check(const CostTable& table) {
    table.validate();
    CalibrationReport rep;
    for (auto type : all_workload_types()) {
        const auto spec = default_spec(type);
        const auto b = bench_workload(spec, table);
        const std::string w(to_string(type));
        rep.checks.push_back(band("speedup_abi." + w, b.ratios.speedup_abi, 3.0, 6.0));
        rep.checks.push_back(band("speedup_base_plus_abi." + w, b.ratios.speedup_base_plus_abi, 6.0, 16.0));
        rep.scenarios["bench." + w] = {{"abi", to_json(b.reports.abi)},
                                       {"base", to_json(b.reports.base)},
                                       {"base_plus_abi", to_json(b.reports.base_plus_abi)}};
    }
    const auto bp_bs = bp_bs_pair(table);
    rep.checks.push_back(band("bp_vs_bs_energy_1bit", energy_ratio(bp_bs), 1.5, 1.9));
    rep.scenarios["bp_vs_bs_energy_1bit"] = pair_json(bp_bs);
    const auto l2_l1 = l2_l1_pair(table);
    rep.checks.push_back(band("l2_vs_l1_energy", energy_ratio(l2_l1), 1.2, 1.6));
    rep.scenarios["l2_vs_l1_energy"] = pair_json(l2_l1);
    const auto sp = sparsity_pair(table, 0.7);
    rep.checks.push_back(band("sparsity_savings_70pct", energy_ratio(sp), 1.3, 1.8));
    rep.scenarios["sparsity_savings_70pct"] = pair_json(sp);
    const auto r3 = r3_pair(table);
    rep.checks.push_back(band("r3_power_saving", power_ratio(r3), 1.1, 1.4));
    rep.scenarios["r3_power_saving"] = pair_json(r3);
    return rep;
}

nlohmann::json to_json(const CalibrationReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi}, {"pass", c.pass}});
    }
    return nlohmann::json{{"pass", r.all_pass()}, {"checks", checks}, {"scenarios", r.scenarios}};
}

std::string SweepPoint::run_id() const {
    return std::string(to_string(spec.type)) + "-seed" + std::to_string(spec.seed) + "-bw" +
           std::to_string(spec.bit_wid) + "-sp" + format_fixed(spec.sparsity, 3);
}

std::vector<SweepPoint> sweep_grid(const WorkloadSpec& base, const std::vector<std::uint64_t>& seeds,
                                   const std::vector<int>& bit_wids, const std::vector<double>& sparsities) {
    std::vector<SweepPoint> out;
    const std::vector<std::uint64_t> s = seeds.empty() ? std::vector<std::uint64_t>{base.seed} : seeds;
    const std::vector<int> b = bit_wids.empty() ? std::vector<int>{base.bit_wid} : bit_wids;
    const std::vector<double> p = sparsities.empty() ? std::vector<double>{base.sparsity} : sparsities;
    for (auto seed : s) {
        for (auto bw : b) {
            for (auto sp : p) {
                SweepPoint pt{base};
                pt.spec.seed = seed;
                pt.spec.bit_wid = bw;
                pt.spec.sparsity = sp;
                out.push_back(std::move(pt));
            }
        }
    }
    return out;
}

std::vector<SweepResult> run_sweep(const std::vector<SweepPoint>& points, const CostTable& table, unsigned threads) {
    std::vector<SweepResult> results(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const auto i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                const auto b = bench_workload(points[i].spec, table);
                results[i] = SweepResult{points[i].run_id(), b.outcome.oracle_match, b.reports.abi, b.reports.base,
                                         b.reports.base_plus_abi, b.ratios};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    std::stable_sort(results.begin(), results.end(),
                     [](const SweepResult& a, const SweepResult& b) { return a.run_id < b.run_id; });
    return results;
}

nlohmann::json to_json(const SweepResult& r) {
    return nlohmann::json{{"run_id", r.run_id},
                          {"oracle_match", r.oracle_match},
                          {"abi", to_json(r.abi)},
                          {"base", to_json(r.base)},
                          {"base_plus_abi", to_json(r.base_plus_abi)},
                          {"ratios", to_json(r.ratios)}};
}

}  // namespace abisim::workloads
