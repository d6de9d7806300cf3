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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "abisim/cost_model.hpp"
#include "abisim/engine.hpp"
#include "abisim/engine_config.hpp"
#include "abisim/errors.hpp"
#include "abisim/executor.hpp"
#include "abisim/isa.hpp"
#include "abisim/lwsm.hpp"
#include "abisim/workloads/runner.hpp"

#ifndef ABISIM_VERSION
#define ABISIM_VERSION "0.0.0"
#endif

namespace abisim::cli {

namespace {

using nlohmann::json;
namespace wl = abisim::workloads;

constexpr int kSchemaVersion = 1;
constexpr const char* kConfigEnv = "ABISIM_CONFIG";

enum class Format { Json, Csv };

/// Options shared by every subcommand.
struct Common {
    std::string out;
    std::string format = "json";
    std::string calibration;
    bool timestamp = false;
    std::optional<std::uint64_t> seed;
};

/// Raised when a workload oracle or a calibration band fails; the report is
/// still written, the exit code becomes kMismatch.
struct Verdict {
    bool ok = true;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json envelope(const std::string& command, const Common& c) {
    json doc{{"tool", "abisim"}, {"version", ABISIM_VERSION}, {"command", command}, {"schema_version", kSchemaVersion}};
    if (c.timestamp) doc["generated_at"] = utc_timestamp();
    return doc;
}

Format parse_format(const std::string& f) {
    if (f == "json") return Format::Json;
    if (f == "csv") return Format::Csv;
    throw ConfigError("unknown format '" + f + "' (expected json or csv)");
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
    if (!f) throw FileNotFound("cannot open output file: " + c.out);
    f << text;
    if (!f) throw FileNotFound("failed writing output file: " + c.out);
}

void emit_json(const json& doc, const Common& c, std::ostream& out) { emit(doc.dump(2) + '\n', c, out); }

CostTable cost_table(const Common& c) {
    return c.calibration.empty() ? default_cost_table() : load_cost_table(c.calibration);
}

/// Spec from --spec (if any) or the built-in default of --workload; --seed
/// overrides the file. Randomized commands need a seed from one of the two.
wl::WorkloadSpec resolve_spec(const std::string& workload, const std::string& spec_path, const Common& c) {
    wl::WorkloadSpec spec;
    bool seeded = c.seed.has_value();
    if (!spec_path.empty()) {
        const json doc = read_json_file(spec_path);
        spec = wl::workload_spec_from_json(doc);
        seeded = seeded || (doc.is_object() && doc.contains("seed"));
        if (!workload.empty() && wl::parse_workload_type(workload) != spec.type) {
            throw ConfigError("--workload " + workload + " does not match spec type " +
                              std::string(wl::to_string(spec.type)));
        }
    } else if (!workload.empty()) {
        spec = wl::default_spec(wl::parse_workload_type(workload));
    } else {
        throw ConfigError("one of --workload or --spec is required");
    }
    if (!seeded) throw ConfigError("a seed is required: pass --seed or set \"seed\" in the spec file");
    if (c.seed) spec.seed = *c.seed;
    return spec;
}

std::string csv_reports(const std::vector<const RunReport*>& reports) {
    std::string s = csv_header() + '\n';
    for (const auto* r : reports) s += to_csv_row(*r) + '\n';
    return s;
}

std::string ratios_csv_header() {
    return "workload,seed,oracle_match,speedup_abi,speedup_base_plus_abi,efficiency_abi,efficiency_base_plus_abi,"
           "sparsity_savings";
}

std::string ratios_csv_row(const std::string& workload, std::uint64_t seed, bool match, const RatioSummary& r) {
    std::string s = workload + ',' + std::to_string(seed) + ',' + (match ? "true" : "false") + ',' +
                    format_number(r.speedup_abi) + ',' + format_number(r.speedup_base_plus_abi) + ',' +
                    format_number(r.efficiency_abi) + ',' + format_number(r.efficiency_base_plus_abi) + ',';
    if (r.sparsity_savings) s += format_number(*r.sparsity_savings);
    return s;
}

// --- subcommands ------------------------------------------------------------------

Verdict cmd_run(const std::string& program_path, std::string config_path, const Common& c, std::ostream& out) {
    const Format fmt = parse_format(c.format);
    if (config_path.empty()) {
        if (const char* env = std::getenv(kConfigEnv); env != nullptr) config_path = env;
    }
    const std::string source = read_text_file(program_path);
    const Program program = assemble(source);
    const EngineConfig cfg = config_path.empty() ? EngineConfig{} : load_engine_config(config_path);
    const CostTable table = cost_table(c);
    Engine engine(cfg, table.latency);
    const ProgramRun run = run_program(program, engine, table);

    RunReport report = run.report;
    report.workload = std::filesystem::path(program_path).stem().string();
    if (fmt == Format::Csv) {
        emit(csv_reports({&report}), c, out);
        return {};
    }
    json doc = envelope("run", c);
    doc["program"] = std::filesystem::path(program_path).filename().string();
    doc["notes"] = program.notes;
    doc["config"] = to_json(cfg);
    doc["report"] = to_json(report);
    doc["final_state"] = engine.snapshot();
    emit_json(doc, c, out);
    return {};
}

Verdict cmd_bench(const std::string& workload, const std::string& spec_path, const Common& c, std::ostream& out) {
    const Format fmt = parse_format(c.format);
    const auto spec = resolve_spec(workload, spec_path, c);
    const auto result = wl::bench_workload(spec, cost_table(c));
    if (fmt == Format::Csv) {
        emit(csv_reports({&result.reports.base, &result.reports.abi, &result.reports.base_plus_abi,
                          &*result.reports.abi_sparsity_off}),
             c, out);
    } else {
        json doc = envelope("bench", c);
        doc.update(wl::to_json(result, spec));
        emit_json(doc, c, out);
    }
    return {result.outcome.oracle_match};
}

Verdict cmd_compare(const std::string& workload, const std::string& spec_path, const Common& c, std::ostream& out) {
    const Format fmt = parse_format(c.format);
    const auto spec = resolve_spec(workload, spec_path, c);
    const auto result = wl::bench_workload(spec, cost_table(c));
    const auto name = std::string(wl::to_string(spec.type));
    if (fmt == Format::Csv) {
        emit(ratios_csv_header() + '\n' + ratios_csv_row(name, spec.seed, result.outcome.oracle_match, result.ratios) +
                 '\n',
             c, out);
    } else {
        auto summary = [](const RunReport& r) {
            return json{{"cycles", r.cycles}, {"energy", r.energy}, {"ops", r.ops}, {"instructions", r.instructions}};
        };
        json doc = envelope("compare", c);
        doc["workload"] = name;
        doc["seed"] = spec.seed;
        doc["oracle_match"] = result.outcome.oracle_match;
        doc["totals"] = {{"base", summary(result.reports.base)},
                         {"abi", summary(result.reports.abi)},
                         {"base_plus_abi", summary(result.reports.base_plus_abi)},
                         {"abi_sparsity_off", summary(*result.reports.abi_sparsity_off)}};
        doc["ratios"] = to_json(result.ratios);
        emit_json(doc, c, out);
    }
    return {result.outcome.oracle_match};
}

struct SweepArgs {
    std::string workload;
    std::string spec;
    std::vector<std::uint64_t> seeds;
    std::vector<int> bit_wids;
    std::vector<double> sparsities;
    unsigned threads = 1;
};

Verdict cmd_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
    const Format fmt = parse_format(c.format);
    Common seeded = c;
    if (!a.seeds.empty() && !seeded.seed) seeded.seed = a.seeds.front();
    auto base = resolve_spec(a.workload, a.spec, seeded);
    const std::vector<std::uint64_t> seeds = a.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : a.seeds;
    const std::vector<int> bws = a.bit_wids.empty() ? std::vector<int>{base.bit_wid} : a.bit_wids;
    const std::vector<double> sps = a.sparsities.empty() ? std::vector<double>{base.sparsity} : a.sparsities;
    if (a.threads == 0) throw ConfigError("--threads must be at least 1");

    const auto points = wl::sweep_grid(base, seeds, bws, sps);
    const auto results = wl::run_sweep(points, cost_table(c), a.threads);
    const bool all_match =
        std::all_of(results.begin(), results.end(), [](const wl::SweepResult& r) { return r.oracle_match; });

    if (fmt == Format::Csv) {
        std::string s = "run_id,oracle_match," + csv_header() + '\n';
        for (const auto& r : results) {
            const std::string prefix = r.run_id + ',' + (r.oracle_match ? "true" : "false") + ',';
            for (const auto* rep : {&r.base, &r.abi, &r.base_plus_abi}) s += prefix + to_csv_row(*rep) + '\n';
        }
        emit(s, c, out);
    } else {
        json doc = envelope("sweep", c);
        doc["workload"] = std::string(wl::to_string(base.type));
        doc["points"] = results.size();
        doc["all_oracle_match"] = all_match;
        json arr = json::array();
        for (const auto& r : results) arr.push_back(wl::to_json(r));
        doc["results"] = std::move(arr);
        emit_json(doc, c, out);
    }
    return {all_match};
}

struct LwsmArgs {
    std::vector<std::size_t> n{8, 16, 64};
    std::size_t trials = 10000;
    int frac_bits = 8;
};

Verdict cmd_lwsm_stats(const LwsmArgs& a, const Common& c, std::ostream& out) {
    const Format fmt = parse_format(c.format);
    if (!c.seed) throw ConfigError("a seed is required: pass --seed");
    if (a.trials == 0) throw ConfigError("--trials must be at least 1");
    std::vector<LwsmSweepStats> stats;
    for (std::size_t i = 0; i < a.n.size(); ++i) {
        if (a.n[i] < 2) throw ConfigError("--n values must be at least 2");
        // Each vector length gets its own stream derived from the base seed.
        stats.push_back(lwsm_error_sweep(a.n[i], a.trials, *c.seed + i, a.frac_bits));
    }
    if (fmt == Format::Csv) {
        std::string s =
            "n,trials,seed,argmax_agreement,mean_abs_err,min_ratio,max_ratio,octave_subset,octave_agreement\n";
        for (const auto& st : stats) {
            s += std::to_string(st.n) + ',' + std::to_string(st.trials) + ',' + std::to_string(st.seed) + ',' +
                 format_number(st.argmax_agreement) + ',' + format_number(st.mean_abs_err) + ',' +
                 format_number(st.min_ratio) + ',' + format_number(st.max_ratio) + ',' +
                 std::to_string(st.octave_subset) + ',' + format_number(st.octave_agreement) + '\n';
        }
        emit(s, c, out);
    } else {
        json doc = envelope("lwsm-stats", c);
        doc["seed"] = *c.seed;
        doc["frac_bits"] = a.frac_bits;
        json arr = json::array();
        for (const auto& st : stats) arr.push_back(to_json(st));
        doc["stats"] = std::move(arr);
        emit_json(doc, c, out);
    }
    return {};
}

Verdict cmd_calibrate_check(const Common& c, std::ostream& out) {
    const Format fmt = parse_format(c.format);
    const auto report = wl::calibrate_check(cost_table(c));
    if (fmt == Format::Csv) {
        std::string s = "name,value,lo,hi,pass\n";
        for (const auto& b : report.checks) {
            s += b.name + ',' + format_number(b.value) + ',' + format_number(b.lo) + ',' + format_number(b.hi) + ',' +
                 (b.pass ? "true" : "false") + '\n';
        }
        emit(s, c, out);
    } else {
        json doc = envelope("calibrate-check", c);
        doc["calibration"] = c.calibration.empty() ? std::string("built-in")
                                                   : std::filesystem::path(c.calibration).filename().string();
        doc.update(wl::to_json(report));
        emit_json(doc, c, out);
    }
    return {report.all_pass()};
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"abisim: near-register-file / near-cache compute simulator", "abisim"};
    app.set_version_flag("--version", ABISIM_VERSION);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out,-o", common.out, "Write the report to this file instead of stdout");
        sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--calibration", common.calibration, "Cost table JSON (default: built-in calibration)");
        sub->add_flag("--timestamp", common.timestamp, "Add generated_at (reports are otherwise byte-stable)");
        sub->add_option("--seed", common.seed, "RNG seed for randomized inputs");
    };

    std::string program_path;
    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Assemble and execute an .abi program");
    run_cmd->add_option("program", program_path, "Program source (.abi)")->required();
    run_cmd->add_option("--config", config_path, std::string("Engine config JSON (default: $") + kConfigEnv + ")");
    add_common(run_cmd);

    std::string workload;
    std::string spec_path;
    auto add_workload = [&](CLI::App* sub) {
        sub->add_option("--workload,-w", workload, "cnn | ising | lp | gcn | attn");
        sub->add_option("--spec", spec_path, "Workload spec JSON");
        add_common(sub);
    };
    auto* bench_cmd = app.add_subcommand("bench", "Run a workload with its oracle check and cost reports");
    add_workload(bench_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "BASE / ABI / BASE+ABI ratios of a workload");
    add_workload(compare_cmd);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid of workload runs over seeds, bit widths and sparsities");
    add_workload(sweep_cmd);
    sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds to sweep")->delimiter(',');
    sweep_cmd->add_option("--bit-wids", sweep.bit_wids, "Bit widths to sweep")->delimiter(',');
    sweep_cmd->add_option("--sparsities", sweep.sparsities, "Sparsities to sweep")->delimiter(',');
    sweep_cmd->add_option("--threads", sweep.threads, "Concurrent runs")->capture_default_str();

    LwsmArgs lwsm_args;
    auto* lwsm_cmd = app.add_subcommand("lwsm-stats", "Accuracy statistics of the lightweight softmax");
    lwsm_cmd->add_option("--n", lwsm_args.n, "Vector lengths")->delimiter(',')->capture_default_str();
    lwsm_cmd->add_option("--trials", lwsm_args.trials, "Random vectors per length")->capture_default_str();
    lwsm_cmd->add_option("--frac-bits", lwsm_args.frac_bits, "Fraction bits of x")
        ->check(CLI::Range(1, 24))
        ->capture_default_str();
    add_common(lwsm_cmd);

    auto* calib_cmd = app.add_subcommand("calibrate-check", "Check the cost model against its ratio bands");
    add_common(calib_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        out << sub->help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << ABISIM_VERSION << '\n';
        return kOk;
    } catch (const CLI::Success&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        error_line(err, "UsageError", e.what());
        return kError;
    }

    try {
        Verdict v;
        if (*run_cmd) {
            v = cmd_run(program_path, config_path, common, out);
        } else if (*bench_cmd) {
            v = cmd_bench(workload, spec_path, common, out);
        } else if (*compare_cmd) {
            v = cmd_compare(workload, spec_path, common, out);
        } else if (*sweep_cmd) {
            sweep.workload = workload;
            sweep.spec = spec_path;
            v = cmd_sweep(sweep, common, out);
        } else if (*lwsm_cmd) {
            v = cmd_lwsm_stats(lwsm_args, common, out);
        } else if (*calib_cmd) {
            v = cmd_calibrate_check(common, out);
        }
        if (!v.ok) {
            error_line(err, "Mismatch", "oracle or calibration check failed; see report");
            return kMismatch;
        }
        return kOk;
    } catch (const ExecutionError& e) {
        err << json{{"error", e.kind()},
                    {"message", e.what()},
                    {"instruction", e.instruction_index()},
                    {"snapshot", json::parse(e.snapshot(), nullptr, false)}}
                   .dump()
            << '\n';
        return kError;
    } catch (const AssemblyError& e) {
        err << json{{"error", e.kind()}, {"message", e.what()}, {"line", e.line()}}.dump() << '\n';
        return kError;
    } catch (const Error& e) {
        error_line(err, e.kind(), e.what());
        return kError;
    } catch (const nlohmann::json::exception& e) {
        error_line(err, "SchemaError", e.what());
        return kError;
    } catch (const std::exception& e) {
        error_line(err, "InternalError", e.what());
        return kError;
    }
}

}  // namespace abisim::cli
