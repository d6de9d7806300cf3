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

#include <filesystem>

#include "abisim/cost_model.hpp"
#include "abisim/engine_config.hpp"
#include "abisim/errors.hpp"
#include "abisim/executor.hpp"
#include "abisim/isa.hpp"
#include "abisim/rng.hpp"

namespace abisim {
namespace {

std::string demo(const std::string& name) { return read_text_file(std::string(ABISIM_DATA_DIR) + "/demos/" + name); }

ProgramRun run_source(std::string_view src) {
    Engine engine;
    return run_program(assemble(src), engine, default_cost_table());
}

// Compares everything but source lines.
void expect_same_program(const Program& a, const Program& b) {
    ASSERT_EQ(a.instructions.size(), b.instructions.size());
    for (std::size_t i = 0; i < a.instructions.size(); ++i) {
        const auto& x = a.instructions[i];
        const auto& y = b.instructions[i];
        EXPECT_EQ(x.op, y.op);
        ASSERT_EQ(x.operands.size(), y.operands.size());
        for (std::size_t k = 0; k < x.operands.size(); ++k) {
            EXPECT_EQ(x.operands[k].key, y.operands[k].key);
            EXPECT_EQ(x.operands[k].text, y.operands[k].text);
            EXPECT_EQ(x.operands[k].values, y.operands[k].values);
        }
    }
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.notes, b.notes);
}

TEST(Assembler, ParsesOperandsAndSymbols) {
    const auto p = assemble(
        "# comment line\n"
        "start: PRSET nrf_m=l1 bit_mode=bs elem_mode=ES bit_wid=0x4\n"
        "  ldr values=1,-2,0b11 width=4\n"
        "  VMACRT addr=3 acc=-5 sub=1 th=relu   # trailing comment\n"
        "end:\n"
        "  HALT\n");
    ASSERT_EQ(p.instructions.size(), 4u);
    const auto& prset = p.instructions[0];
    EXPECT_EQ(prset.op, Opcode::PRSET);
    EXPECT_EQ(prset.get("nrf_m", -1), 1);
    EXPECT_EQ(prset.get("bit_mode", -1), 1);
    EXPECT_EQ(prset.get("elem_mode", -1), 1);
    EXPECT_EQ(prset.get("bit_wid", -1), 4);
    EXPECT_EQ(prset.line, 2u);
    EXPECT_EQ(p.instructions[1].find("values")->values, (std::vector<std::int64_t>{1, -2, 3}));
    EXPECT_EQ(p.instructions[2].get("acc", 0), -5);
    EXPECT_EQ(p.instructions[2].get("th", -1), static_cast<std::int64_t>(ThMode::Relu));
    EXPECT_EQ(p.labels.at("start"), 0u);
    EXPECT_EQ(p.labels.at("end"), 3u);
}

TEST(Assembler, Diagnostics) {
    auto kind_of = [](std::string_view src) -> std::pair<std::string, std::size_t> {
        try {
            (void)assemble(src);
        } catch (const AssemblyError& e) {
            return {e.kind(), e.line()};
        }
        return {"none", 0};
    };
    EXPECT_EQ(kind_of("FOO x=1\nHALT\n"), (std::pair<std::string, std::size_t>{"UnknownOpcode", 1}));
    EXPECT_EQ(kind_of("LDR2 value=1\n\n"), (std::pair<std::string, std::size_t>{"UnterminatedProgram", 1}));
    EXPECT_EQ(kind_of(""), (std::pair<std::string, std::size_t>{"UnterminatedProgram", 1}));
    EXPECT_EQ(kind_of("LDR2\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("LDR2 value=x\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("LDR2 value=1 value=2\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("LDR2 addr=1 value=2\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("PRSET warp=1\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("PRSET\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("HALT x=1\n").first, "BadOperand");
    EXPECT_EQ(kind_of("HALT\nHALT\n"), (std::pair<std::string, std::size_t>{"BadOperand", 2}));
    EXPECT_EQ(kind_of("LDR value=1\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("LDR values=1 bank=0\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("VMACRT addr=0 th=sigmoid\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("VMACRT addr=0 chain=2\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("STOUT level=rf\nHALT\n").first, "BadOperand");
    EXPECT_EQ(kind_of("a: HALT\na: \n").first, "BadOperand");
    EXPECT_EQ(kind_of("LDM level=l3 bank=0 addr=0 value=1\nHALT\n").first, "BadOperand");
}

TEST(Assembler, DisassemblyRoundTripsTheDemos) {
    for (const auto& entry : std::filesystem::directory_iterator(std::string(ABISIM_DATA_DIR) + "/demos")) {
        const auto src = read_text_file(entry.path());
        const auto p = assemble(src);
        const auto text = disassemble(p);
        expect_same_program(p, assemble(text));
        EXPECT_EQ(disassemble(assemble(text)), text) << entry.path();
    }
}

// Property: random well-formed programs survive assemble -> disassemble -> assemble.
TEST(Assembler, RandomProgramsRoundTrip) {
    Rng rng(51);
    const std::vector<std::string> th{"bypass", "relu", "cmp", "softmax"};
    const std::vector<std::string> levels{"rf", "L1", "l2"};
    for (int trial = 0; trial < 300; ++trial) {
        std::string src;
        const auto n = rng.uniform_int(0, 20);
        for (int i = 0; i < n; ++i) {
            if (rng.bernoulli(0.2)) src += "l" + std::to_string(i) + ": ";
            switch (rng.uniform_int(0, 6)) {
                case 0: src += "PRSET bit_wid=" + std::to_string(rng.uniform_int(1, 16)) + " sp_act=1"; break;
                case 1:
                    src += "LDM level=" + levels[static_cast<std::size_t>(rng.uniform_int(0, 2))] +
                           " bank=" + std::to_string(rng.uniform_int(0, 7)) + " addr=0x" +
                           std::to_string(rng.uniform_int(0, 9)) + " value=" + std::to_string(rng.uniform_int(-99, 99));
                    break;
                case 2: src += "LDR values=" + std::to_string(rng.uniform_int(-3, 3)) + ",0b101,-7"; break;
                case 3: src += "LDR2 value=" + std::to_string(rng.uniform_int(1, 9)) + " width=8"; break;
                case 4:
                    src += "VMACRT addr=" + std::to_string(rng.uniform_int(0, 63)) +
                           " th=" + th[static_cast<std::size_t>(rng.uniform_int(0, 3))];
                    break;
                case 5: src += "VRED addr=1 partial=1"; break;
                default: src += "STOUT lwsm=0"; break;
            }
            if (rng.bernoulli(0.3)) src += "  # note " + std::to_string(i);
            src += '\n';
            if (rng.bernoulli(0.1)) src += "#@ annotation " + std::to_string(i) + '\n';
        }
        src += "done: HALT\n";
        const auto p = assemble(src);
        expect_same_program(p, assemble(disassemble(p)));
    }
}

TEST(Executor, DemoCapturesReproduce) {
    auto first_compute = [](const ProgramRun& run) {
        for (const auto& s : run.steps) {
            if (s.op == Opcode::VMACRT) return s.detail;
        }
        return nlohmann::json{};
    };
    const auto cnn = run_source(demo("cnn_demo.abi"));
    EXPECT_EQ(first_compute(cnn)["raw_sum"], 8);
    EXPECT_EQ(cnn.outputs, std::vector<std::int64_t>{8});
    const auto lp = run_source(demo("lp_demo.abi"));
    EXPECT_EQ(first_compute(lp)["raw_sum"], 8);
    EXPECT_EQ(first_compute(lp)["scaled"], 4);
    const auto gcn = run_source(demo("gcn_demo.abi"));
    EXPECT_EQ(first_compute(gcn)["raw_sum"], 8);
    EXPECT_EQ(gcn.outputs, std::vector<std::int64_t>{2});
    const auto attn = run_source(demo("attn_demo.abi"));
    EXPECT_EQ(attn.outputs, std::vector<std::int64_t>{2});
    const auto ising_src = demo("ising_demo.abi");
    const auto ising = run_source(ising_src);
    EXPECT_EQ(first_compute(ising)["raw_sum"], 8);
    EXPECT_NE(assemble(ising_src).notes.size(), 0u);
}

TEST(Executor, RuntimeErrorsCarryIndexAndSnapshot) {
    try {
        (void)run_source("PRSET dis_s=0\nLDR values=1,1,1,1,1,1,1,1\nLDR2 value=0\nVMACRT addr=0\nHALT\n");
        FAIL() << "expected a divide by zero";
    } catch (const ExecutionError& e) {
        EXPECT_EQ(e.kind(), "DivideByZeroError");
        EXPECT_EQ(e.instruction_index(), 3u);
        const auto snap = nlohmann::json::parse(e.snapshot());
        EXPECT_EQ(snap["reg2"], 0);
    }
    EXPECT_THROW((void)run_source("VMACRT addr=64\nHALT\n"), ExecutionError);
    EXPECT_THROW((void)run_source("LDR2 value=300 width=8\nHALT\n"), ExecutionError);
    EXPECT_THROW((void)run_source("STOUT\nHALT\n"), ExecutionError);
}

TEST(Executor, ChainedTilesAndWriteBack) {
    const auto run = run_source(
        "PRSET bit_wid=4\n"
        "LDM level=rf bank=0 addr=0 value=3\n"
        "LDM level=rf bank=1 addr=1 value=5\n"
        "LDR values=2,2,2,2,2,2,2,2\n"
        "VMACRT addr=0 partial=1\n"
        "VMACRT addr=1 chain=1\n"
        "STOUT level=l1 bank=2 addr=7\n"
        "HALT\n");
    EXPECT_EQ(run.outputs, std::vector<std::int64_t>{16});
    EXPECT_EQ(run.report.extra["results"].size(), 3u);
    EXPECT_GT(run.report.extra["baseline_instructions"].get<int>(), 0);
}

TEST(Executor, SoftmaxThroughStout) {
    const auto run = run_source(
        "PRSET bit_wid=4 dis_th=0 sm_act=1\n"
        "LDM level=rf bank=0 addr=0 value=1\n"
        "LDM level=rf bank=0 addr=1 value=9\n"
        "LDR bank=0 value=1\n"
        "VMACRT addr=0\n"
        "VMACRT addr=1\n"
        "STOUT lwsm=1\n"
        "HALT\n");
    ASSERT_EQ(run.outputs.size(), 2u);
    // Scores 1 and 9 normalise to 1.0 and 1.5: the same leading one, so
    // both get 2^-1 and the tie resolves to the first element.
    EXPECT_EQ(run.outputs, (std::vector<std::int64_t>{128, 128}));
    const auto& lw = run.steps[6].detail;
    EXPECT_EQ(lw["argmax"], 0);
    EXPECT_EQ(lw["frac_bits"], 8);
}

TEST(Executor, StopsAtHalt) {
    const auto run = run_source("LDR2 value=3\nHALT\n");
    EXPECT_EQ(run.steps.size(), 2u);
    EXPECT_EQ(run.steps.back().op, Opcode::HALT);
}

}  // namespace
}  // namespace abisim
