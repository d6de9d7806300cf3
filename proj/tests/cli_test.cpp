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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kData = ABISIM_DATA_DIR;

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Invocation r;
    r.code = abisim::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

nlohmann::json error_line(const Invocation& r) {
    const auto nl = r.err.find('\n');
    EXPECT_NE(nl, std::string::npos);
    EXPECT_EQ(nl + 1, r.err.size()) << "exactly one stderr line";
    return nlohmann::json::parse(r.err.substr(0, nl));
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("abisim_cli_test_" + name); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

TEST(Cli, RunDemoProducesReport) {
    const auto r = invoke({"run", kData + "/demos/cnn_demo.abi"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["tool"], "abisim");
    EXPECT_EQ(doc["command"], "run");
    EXPECT_FALSE(doc.contains("generated_at"));
    EXPECT_EQ(doc["report"]["workload"], "cnn_demo");
    EXPECT_EQ(doc["report"]["extra"]["outputs"], nlohmann::json::array({8}));
    EXPECT_FALSE(doc["notes"].empty());
}

TEST(Cli, TimestampIsOptIn) {
    const auto r = invoke({"run", kData + "/demos/gcn_demo.abi", "--timestamp"});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(nlohmann::json::parse(r.out).contains("generated_at"));
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
    const std::vector<std::vector<std::string>> commands{
        {"run", kData + "/demos/ising_demo.abi"},
        {"bench", "--workload", "gcn", "--seed", "7"},
        {"compare", "--spec", kData + "/specs/attn.json", "--format", "csv"},
        {"sweep", "--workload", "lp", "--seeds", "1,2", "--bit-wids", "3", "--sparsities", "0,0.5", "--threads",
         "2"},
        {"lwsm-stats", "--seed", "3", "--n", "8", "--trials", "200"},
    };
    for (const auto& args : commands) {
        const auto a = invoke(args);
        const auto b = invoke(args);
        ASSERT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(a.out, b.out) << args[0];
    }
}

TEST(Cli, SeedChangesRandomizedReports) {
    const auto a = invoke({"bench", "--workload", "cnn", "--seed", "1"});
    const auto b = invoke({"bench", "--workload", "cnn", "--seed", "2"});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_NE(a.out, b.out);
}

TEST(Cli, RandomizedCommandsRequireASeed) {
    const auto r = invoke({"bench", "--workload", "cnn"});
    EXPECT_EQ(r.code, abisim::cli::kError);
    EXPECT_EQ(error_line(r)["error"], "ConfigError");
    const auto l = invoke({"lwsm-stats"});
    EXPECT_EQ(l.code, abisim::cli::kError);
}

TEST(Cli, ErrorsAreOneJsonLine) {
    const auto missing = invoke({"run", "/nonexistent/prog.abi"});
    EXPECT_EQ(missing.code, abisim::cli::kError);
    EXPECT_EQ(error_line(missing)["error"], "FileNotFound");

    const auto bad = temp_file("bad.abi");
    write(bad, "LDR2 value=1\nFROB\nHALT\n");
    const auto asm_err = invoke({"run", bad.string()});
    EXPECT_EQ(asm_err.code, abisim::cli::kError);
    const auto line = error_line(asm_err);
    EXPECT_EQ(line["error"], "UnknownOpcode");
    EXPECT_EQ(line["line"], 2);

    write(bad, "PRSET dis_s=0\nLDR2 value=0\nVMACRT addr=0\nHALT\n");
    const auto exec_err = invoke({"run", bad.string()});
    EXPECT_EQ(exec_err.code, abisim::cli::kError);
    const auto eline = error_line(exec_err);
    EXPECT_EQ(eline["error"], "DivideByZeroError");
    EXPECT_EQ(eline["instruction"], 2);
    EXPECT_TRUE(eline["snapshot"].is_object());
    fs::remove(bad);

    const auto usage = invoke({"bench", "--bogus"});
    EXPECT_EQ(usage.code, abisim::cli::kError);
    EXPECT_EQ(error_line(usage)["error"], "UsageError");

    const auto no_workload = invoke({"bench", "--seed", "1"});
    EXPECT_EQ(error_line(no_workload)["error"], "ConfigError");
}

TEST(Cli, ConfigFromEnvironment) {
    const auto cfg = temp_file("cfg.json");
    write(cfg, "{\"banks\": 8, \"words_per_bank\": 2}");
    ::setenv("ABISIM_CONFIG", cfg.string().c_str(), 1);
    // The demo fits in two RF rows.
    const auto ok = invoke({"run", kData + "/demos/cnn_demo.abi"});
    ::setenv("ABISIM_CONFIG", "/nonexistent/cfg.json", 1);
    const auto missing = invoke({"run", kData + "/demos/cnn_demo.abi"});
    ::unsetenv("ABISIM_CONFIG");
    fs::remove(cfg);
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_EQ(nlohmann::json::parse(ok.out)["config"]["words_per_bank"], 2);
    EXPECT_EQ(missing.code, abisim::cli::kError);
    EXPECT_EQ(error_line(missing)["error"], "FileNotFound");
}

TEST(Cli, OutFileAndCsv) {
    const auto path = temp_file("compare.csv");
    const auto r = invoke({"compare", "--workload", "cnn", "--seed", "4", "--format", "csv", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::string row;
    std::getline(in, header);
    std::getline(in, row);
    fs::remove(path);
    EXPECT_EQ(header,
              "workload,seed,oracle_match,speedup_abi,speedup_base_plus_abi,efficiency_abi,"
              "efficiency_base_plus_abi,sparsity_savings");
    EXPECT_EQ(row.rfind("cnn,4,true,", 0), 0u) << row;
}

TEST(Cli, CalibrationBandFailureExitsTwo) {
    auto doc = nlohmann::json::parse(std::ifstream(kData + "/calibration.json"));
    doc["baseline"]["instr_latency"] = 20.0;
    const auto path = temp_file("calib.json");
    write(path, doc.dump());
    const auto r = invoke({"calibrate-check", "--calibration", path.string()});
    fs::remove(path);
    EXPECT_EQ(r.code, abisim::cli::kMismatch);
    EXPECT_FALSE(nlohmann::json::parse(r.out)["pass"].get<bool>());
    EXPECT_EQ(error_line(r)["error"], "Mismatch");

    const auto ok = invoke({"calibrate-check"});
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(nlohmann::json::parse(ok.out)["pass"].get<bool>());
}

TEST(Cli, HelpAndVersion) {
    const auto help = invoke({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("calibrate-check"), std::string::npos);
    const auto none = invoke({});
    EXPECT_EQ(none.code, abisim::cli::kError);
}

}  // namespace
