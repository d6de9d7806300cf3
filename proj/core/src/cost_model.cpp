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

#include "abisim/cost_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "abisim/engine_config.hpp"
#include "abisim/errors.hpp"

namespace abisim {

using nlohmann::json;

namespace {

using Counts = std::array<double, kNumEventClasses>;

void bump(Counts& c, EventClass cls, double n) { c[static_cast<std::size_t>(cls)] += n; }

double price_counts(const Counts& counts, const CostTable& table) {
    double e = 0.0;
    for (std::size_t i = 0; i < kNumEventClasses; ++i) e += counts[i] * table.energy[i];
    return e;
}

Counts to_counts(const EventCounts& ec) {
    Counts c{};
    for (std::size_t i = 0; i < kNumEventClasses; ++i) c[i] = static_cast<double>(ec[i]);
    return c;
}

bool is_fused_work(OpKind k) { return k == OpKind::Fused || k == OpKind::Reduce || k == OpKind::LwsmFlush; }
bool is_alu_aux(OpKind k) { return k == OpKind::LoadReg || k == OpKind::LoadReg2 || k == OpKind::Store; }

double abi_cycles(const OpRecord& op, const LatencyModel& lat) {
    switch (op.kind) {
        case OpKind::Fused:
            return fused_latency(lat, op.level, op.bit_mode, op.elem_mode, op.bit_wid, op.banks);
        case OpKind::Reduce: return reduce_latency(lat, op.level, op.elem_mode, op.banks);
        case OpKind::LwsmFlush: return static_cast<double>(op.elements) + 1.0;
        case OpKind::LoadReg:
        case OpKind::LoadReg2:
        case OpKind::Store:
        case OpKind::ProgSet: return lat.aux;
        case OpKind::Preload: return 0.0;
    }
    return 0.0;
}

// Write events the near-memory side spends on an auxiliary op.
double abi_aux_writes(const OpRecord& op) {
    switch (op.kind) {
        case OpKind::LoadReg: return op.banks;
        case OpKind::LoadReg2:
        case OpKind::Store: return 1.0;
        default: return 0.0;
    }
}

struct BaseCost {
    std::uint64_t instrs = 0;
    double cycles = 0.0;
    Counts events{};
};

BaseCost expand(const OpRecord& op, const BaselineParams& p) {
    BaseCost c;
    const double lanes = std::max<double>(op.banks, 1.0);
    auto scalar = [&](std::uint64_t n, double rf_per) {
        c.instrs += n;
        bump(c.events, EventClass::BaseAluMac, static_cast<double>(n));
        bump(c.events, EventClass::BaseRfAccess, rf_per * static_cast<double>(n));
    };
    auto fused_body = [&](bool with_mac) {
        // operand load
        c.instrs += 1;
        c.cycles += p.load_extra[static_cast<std::size_t>(op.level)];
        bump(c.events, read_class(op.level), 1.0);
        bump(c.events, EventClass::BaseRfAccess, lanes);
        if (with_mac) {
            c.instrs += 1;
            bump(c.events, EventClass::BaseAluMac, lanes);
            bump(c.events, EventClass::BaseRfAccess, 3.0 * lanes);
        }
        const std::uint64_t adds =
            std::max<std::uint64_t>(op.banks > 0 ? op.banks - 1u : 0u, 1u) + ((op.chained || op.with_bias) ? 1u : 0u);
        scalar(adds, 3.0);
        if (op.scaler) scalar(p.div_instrs, 3.0);
        if (!op.partial) scalar(1, 2.0);
    };

    switch (op.kind) {
        case OpKind::Fused: fused_body(true); break;
        case OpKind::Reduce: fused_body(false); break;
        case OpKind::LoadReg:
            c.instrs += 1;
            bump(c.events, EventClass::RfRead, 1.0);
            bump(c.events, EventClass::BaseRfAccess, lanes);
            break;
        case OpKind::LoadReg2:
            c.instrs += 1;
            bump(c.events, EventClass::BaseRfAccess, 1.0);
            break;
        case OpKind::Store:
            c.instrs += 1;
            bump(c.events, EventClass::Write, 1.0);
            bump(c.events, EventClass::BaseRfAccess, 1.0);
            break;
        case OpKind::LwsmFlush: scalar(static_cast<std::uint64_t>(op.elements) * p.softmax_instrs_per_elem, 3.0); break;
        case OpKind::ProgSet:
        case OpKind::Preload: break;
    }
    bump(c.events, EventClass::BaseInstrFetchDecode, static_cast<double>(c.instrs));
    c.cycles += static_cast<double>(c.instrs) * p.instr_latency;
    return c;
}

double get_number(const json& obj, const std::string& key) {
    if (!obj.is_number()) throw SchemaError("'" + key + "' must be a number");
    return obj.get<double>();
}

std::uint32_t get_positive_uint(const json& obj, const std::string& key) {
    if (!obj.is_number_integer() || obj.get<std::int64_t>() < 1) {
        throw SchemaError("'" + key + "' must be a positive integer");
    }
    return static_cast<std::uint32_t>(obj.get<std::int64_t>());
}

}  // namespace

void CostTable::validate() const {
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        if (!(energy[i] >= 0.0) || !std::isfinite(energy[i])) {
            throw SchemaError("energy price for " + std::string(to_string(static_cast<EventClass>(i))) +
                              " must be a finite non-negative number");
        }
    }
    if (latency.nrf < 1 || latency.nm_l1 < 1 || latency.nm_l2 < 1 || latency.aux < 1) {
        throw SchemaError("latencies must be >= 1 cycle");
    }
    if (!(baseline.instr_latency > 0.0)) throw SchemaError("baseline instr_latency must be > 0");
    for (double x : baseline.load_extra) {
        if (!(x >= 0.0)) throw SchemaError("baseline load_extra must be >= 0");
    }
}

CostTable CostTable::unit() {
    CostTable t;
    t.energy.fill(1.0);
    return t;
}

CostTable default_cost_table() {
    CostTable t;
    // BEGIN CALIBRATION
    // Event classes in enum order: reads RF/L1/L2, write, St0..St4, CA, scaler,
    // TH, LWSM, sparsity detect, then the baseline fetch/decode, MAC, RF access.
    t.energy = {1.054, 1.748,   11.25,   0.7676, 0.0438,  0.01325, 0.1711, 0.05649, 0.5,
                0.1024, 1.085, 0.09896, 0.1024, 0.02147, 2.0,     1.0,    0.5};
    t.baseline.instr_latency = 1.3;
    t.baseline.load_extra = {0.0, 2.0, 8.0};
    t.baseline.div_instrs = 1;
    t.baseline.softmax_instrs_per_elem = 6;
    // END CALIBRATION
    return t;
}

CostTable cost_table_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("cost table must be a JSON object");
    CostTable t;
    bool have_energy = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "description") {
            if (!value.is_string()) throw SchemaError("description must be a string");
        } else if (key == "energy") {
            if (!value.is_object()) throw SchemaError("energy must be an object");
            std::array<bool, kNumEventClasses> seen{};
            for (const auto& [cls, price] : value.items()) {
                auto c = parse_event_class(cls);
                if (!c) throw SchemaError("unknown event class '" + cls + "'");
                t.set_price(*c, get_number(price, cls));
                seen[static_cast<std::size_t>(*c)] = true;
            }
            for (std::size_t i = 0; i < kNumEventClasses; ++i) {
                if (!seen[i]) {
                    throw SchemaError("energy table missing class '" +
                                      std::string(to_string(static_cast<EventClass>(i))) + "'");
                }
            }
            have_energy = true;
        } else if (key == "latency") {
            if (!value.is_object()) throw SchemaError("latency must be an object");
            for (const auto& [lk, lv] : value.items()) {
                if (lk == "nrf") t.latency.nrf = get_positive_uint(lv, lk);
                else if (lk == "nm_l1") t.latency.nm_l1 = get_positive_uint(lv, lk);
                else if (lk == "nm_l2") t.latency.nm_l2 = get_positive_uint(lv, lk);
                else if (lk == "aux") t.latency.aux = get_positive_uint(lv, lk);
                else throw SchemaError("unknown latency key '" + lk + "'");
            }
        } else if (key == "baseline") {
            if (!value.is_object()) throw SchemaError("baseline must be an object");
            for (const auto& [bk, bv] : value.items()) {
                if (bk == "instr_latency") {
                    t.baseline.instr_latency = get_number(bv, bk);
                } else if (bk == "load_extra") {
                    if (!bv.is_object()) throw SchemaError("load_extra must be an object");
                    for (const auto& [lvl, x] : bv.items()) {
                        auto level = parse_level(lvl);
                        if (!level) throw SchemaError("unknown level '" + lvl + "'");
                        t.baseline.load_extra[static_cast<std::size_t>(*level)] = get_number(x, lvl);
                    }
                } else if (bk == "div_instrs") {
                    t.baseline.div_instrs = get_positive_uint(bv, bk);
                } else if (bk == "softmax_instrs_per_elem") {
                    t.baseline.softmax_instrs_per_elem = get_positive_uint(bv, bk);
                } else {
                    throw SchemaError("unknown baseline key '" + bk + "'");
                }
            }
        } else {
            throw SchemaError("unknown cost table key '" + key + "'");
        }
    }
    if (!have_energy) throw SchemaError("cost table needs an energy section");
    t.validate();
    return t;
}

CostTable load_cost_table(const std::filesystem::path& path) { return cost_table_from_json(read_json_file(path)); }

json to_json(const CostTable& t) {
    json energy = json::object();
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        energy[std::string(to_string(static_cast<EventClass>(i)))] = t.energy[i];
    }
    return json{{"energy", energy},
                {"latency",
                 {{"nrf", t.latency.nrf}, {"nm_l1", t.latency.nm_l1}, {"nm_l2", t.latency.nm_l2}, {"aux", t.latency.aux}}},
                {"baseline",
                 {{"instr_latency", t.baseline.instr_latency},
                  {"load_extra",
                   {{"RF", t.baseline.load_extra[0]}, {"L1", t.baseline.load_extra[1]}, {"L2", t.baseline.load_extra[2]}}},
                  {"div_instrs", t.baseline.div_instrs},
                  {"softmax_instrs_per_elem", t.baseline.softmax_instrs_per_elem}}}};
}

EventCounts event_counts_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("event counts must be an object");
    EventCounts counts{};
    for (const auto& [key, value] : doc.items()) {
        auto c = parse_event_class(key);
        if (!c) throw SchemaError("unknown event class '" + key + "'");
        if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
            throw SchemaError("count for '" + key + "' must be a non-negative integer");
        }
        counts[static_cast<std::size_t>(*c)] = value.get<std::uint64_t>();
    }
    return counts;
}

json event_counts_to_json(const EventCounts& counts) {
    json out = json::object();
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        out[std::string(to_string(static_cast<EventClass>(i)))] = counts[i];
    }
    return out;
}

double price_events(const EventCounts& counts, const CostTable& table) {
    return price_counts(to_counts(counts), table);
}

double count_ops(const EventLog& log) {
    double ops = 0.0;
    for (const auto& op : log.ops()) {
        if (op.kind == OpKind::Fused) {
            ops += static_cast<double>(op.banks) * 8.0 / static_cast<double>(std::max<int>(op.bit_wid, 1));
        } else if (op.kind == OpKind::Reduce) {
            ops += op.banks;
        } else if (op.kind == OpKind::LwsmFlush) {
            ops += op.elements;
        }
    }
    return ops;
}

RunReport account(const EventLog& log, const ProgRegs& pr, const CostTable& table) {
    table.validate();
    RunReport r;
    r.variant = "abi";
    for (std::size_t i = 0; i < kNumEventClasses; ++i) r.events[i] = log.counts()[i];
    r.energy = price_events(log.counts(), table);
    for (const auto& op : log.ops()) r.cycles += abi_cycles(op, table.latency);
    for (const auto& op : log.ops()) r.instructions += op.kind == OpKind::Preload ? 0 : 1;
    r.ops = count_ops(log);
    r.config = to_json(pr);
    return r;
}

std::uint64_t baseline_instructions(const OpRecord& op, const BaselineParams& params) {
    return expand(op, params).instrs;
}

RunReport simulate_baseline(const EventLog& trace, const CostTable& table) {
    table.validate();
    RunReport r;
    r.variant = "base";
    Counts total{};
    for (const auto& op : trace.ops()) {
        const auto c = expand(op, table.baseline);
        r.instructions += c.instrs;
        r.cycles += c.cycles;
        for (std::size_t i = 0; i < kNumEventClasses; ++i) total[i] += c.events[i];
    }
    r.events = total;
    r.energy = price_counts(total, table);
    r.ops = count_ops(trace);
    return r;
}

RunReport simulate_base_plus_abi(const EventLog& trace, const CostTable& table) {
    table.validate();
    double abi_fused = 0.0;   // NRF cycles of fused work
    double base_fused = 0.0;  // ALU cycles of the same work
    double alu_aux = 0.0;     // loads/stores on the ALU side
    double nrf_only = 0.0;    // PR writes
    Counts base_fused_ev{};
    Counts base_aux_ev{};
    double abi_aux_write = 0.0;
    std::uint64_t instrs = 0;

    for (const auto& op : trace.ops()) {
        if (op.kind == OpKind::Preload) continue;
        const auto bc = expand(op, table.baseline);
        if (is_fused_work(op.kind)) {
            abi_fused += abi_cycles(op, table.latency);
            base_fused += bc.cycles;
            for (std::size_t i = 0; i < kNumEventClasses; ++i) base_fused_ev[i] += bc.events[i];
            instrs += 1;
        } else if (is_alu_aux(op.kind)) {
            alu_aux += bc.cycles;
            for (std::size_t i = 0; i < kNumEventClasses; ++i) base_aux_ev[i] += bc.events[i];
            abi_aux_write += abi_aux_writes(op);
            instrs += bc.instrs;
        } else {
            nrf_only += abi_cycles(op, table.latency);
            instrs += 1;
        }
    }

    // Share g of the fused work goes to the ALUs:
    //   ALU time = alu_aux + g * base_fused,  NRF time = nrf_only + (1 - g) * abi_fused.
    double g = 0.0;
    const double nrf_all = nrf_only + abi_fused;
    if (alu_aux < nrf_all && abi_fused + base_fused > 0.0) {
        g = std::clamp((nrf_all - alu_aux) / (abi_fused + base_fused), 0.0, 1.0);
    }
    const double alu_time = alu_aux + g * base_fused;
    const double nrf_time = nrf_only + (1.0 - g) * abi_fused;

    // Near-memory energy of the fused work: the whole ABI log minus the
    // register/store writes that the ALU side now performs.
    Counts abi_fused_ev = to_counts(trace.counts());
    abi_fused_ev[static_cast<std::size_t>(EventClass::Write)] =
        std::max(0.0, abi_fused_ev[static_cast<std::size_t>(EventClass::Write)] - abi_aux_write);

    Counts mix{};
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        mix[i] = base_aux_ev[i] + g * base_fused_ev[i] + (1.0 - g) * abi_fused_ev[i];
    }
    RunReport r;
    r.variant = "base_plus_abi";
    r.cycles = std::max(alu_time, nrf_time);
    r.events = mix;
    r.energy = price_counts(mix, table);
    r.ops = count_ops(trace);
    r.instructions = instrs;
    r.alu_share = g;
    return r;
}

RatioSummary compare(const ReportSet& s) {
    auto same = [&](const RunReport& a, const RunReport& b) { return a.workload == b.workload && a.seed == b.seed; };
    if (!same(s.base, s.abi) || !same(s.base, s.base_plus_abi) ||
        (s.abi_sparsity_off && !same(s.base, *s.abi_sparsity_off))) {
        throw ComparisonError("reports come from different workloads or seeds");
    }
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 1.0; };
    RatioSummary out;
    out.speedup_abi = ratio(s.base.cycles, s.abi.cycles);
    out.speedup_base_plus_abi = ratio(s.base.cycles, s.base_plus_abi.cycles);
    out.efficiency_abi = ratio(s.abi.ops_per_energy(), s.base.ops_per_energy());
    out.efficiency_base_plus_abi = ratio(s.base_plus_abi.ops_per_energy(), s.base.ops_per_energy());
    if (s.base.ops == 0.0) {
        out.efficiency_abi = ratio(s.base.energy, s.abi.energy);
        out.efficiency_base_plus_abi = ratio(s.base.energy, s.base_plus_abi.energy);
    }
    if (s.abi_sparsity_off) out.sparsity_savings = ratio(s.abi_sparsity_off->energy, s.abi.energy);
    return out;
}

json to_json(const RunReport& r) {
    json events = json::object();
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        events[std::string(to_string(static_cast<EventClass>(i)))] = r.events[i];
    }
    json out{{"workload", r.workload},
             {"variant", r.variant},
             {"seed", r.seed},
             {"cycles", r.cycles},
             {"energy", r.energy},
             {"ops", r.ops},
             {"instructions", r.instructions},
             {"ops_per_energy", r.ops_per_energy()},
             {"events", events},
             {"config", r.config},
             {"extra", r.extra}};
    if (r.alu_share) out["alu_share"] = *r.alu_share;
    return out;
}

json to_json(const RatioSummary& r) {
    json out{{"speedup_abi", r.speedup_abi},
             {"speedup_base_plus_abi", r.speedup_base_plus_abi},
             {"efficiency_abi", r.efficiency_abi},
             {"efficiency_base_plus_abi", r.efficiency_base_plus_abi}};
    out["sparsity_savings"] = r.sparsity_savings ? json(*r.sparsity_savings) : json(nullptr);
    return out;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_header() {
    std::string h = "workload,variant,seed,cycles,energy,ops,instructions,ops_per_energy";
    for (std::size_t i = 0; i < kNumEventClasses; ++i) {
        h += ',';
        h += to_string(static_cast<EventClass>(i));
    }
    return h;
}

std::string to_csv_row(const RunReport& r) {
    std::string row = r.workload + ',' + r.variant + ',' + std::to_string(r.seed) + ',' + format_number(r.cycles) + ',' +
                      format_number(r.energy) + ',' + format_number(r.ops) + ',' + std::to_string(r.instructions) +
                      ',' + format_number(r.ops_per_energy());
    for (double e : r.events) row += ',' + format_number(e);
    return row;
}

}  // namespace abisim
