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

#include "abisim/executor.hpp"

#include <string>

#include "abisim/errors.hpp"

namespace abisim {

namespace {

Word make_word(const Instruction& ins, std::int64_t value) {
    if (ins.get("spin", 0) != 0) return Word::spin(static_cast<int>(value));
    const auto width = ins.get("width", Word::kMaxWidth);
    if (width < 1 || width > Word::kMaxWidth) throw RangeError("width must be in [1,16]");
    if (!Word::representable(value, static_cast<int>(width))) {
        throw RangeError("value " + std::to_string(value) + " not representable in " + std::to_string(width) +
                         " bits");
    }
    return Word::make(static_cast<std::int32_t>(value), static_cast<int>(width));
}

std::size_t as_index(std::int64_t v, const char* what) {
    if (v < 0) throw AddressError(std::string(what) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

FusedOptions fused_options(const Instruction& ins) {
    FusedOptions opt;
    if (const auto* acc = ins.find("acc")) {
        opt.acc_in = acc->value();
        opt.with_bias = true;
    }
    opt.chained = ins.get("chain", 0) != 0;
    opt.subtract = ins.get("sub", 0) != 0;
    opt.partial = ins.get("partial", 0) != 0;
    opt.compare_ref = ins.get("ref", 0);
    if (const auto* th = ins.find("th")) opt.th_override = static_cast<ThMode>(th->value());
    return opt;
}

nlohmann::json result_json(const RceResult& r) {
    return nlohmann::json{{"raw_sum", r.raw_sum}, {"scaled", r.scaled}, {"th_out", r.th_out},
                          {"l1", r.l1},           {"cycles", r.cycles}, {"per_bank", r.per_bank}};
}

nlohmann::json execute(const Instruction& ins, Engine& engine) {
    switch (ins.op) {
        case Opcode::PRSET:
            for (const auto& o : ins.operands) engine.prset(o.key, o.value());
            return nlohmann::json::object();
        case Opcode::LDM:
            engine.preload(static_cast<MemLevel>(ins.get("level", 0)), as_index(ins.get("bank", 0), "bank"),
                           as_index(ins.get("addr", 0), "addr"), make_word(ins, ins.get("value", 0)));
            return nlohmann::json::object();
        case Opcode::LDR:
            if (const auto* vs = ins.find("values")) {
                std::vector<Word> words;
                words.reserve(vs->values.size());
                for (auto v : vs->values) words.push_back(make_word(ins, v));
                engine.load_reg_vector(words);
            } else {
                engine.load_reg(as_index(ins.get("bank", 0), "bank"), make_word(ins, ins.get("value", 0)));
            }
            return nlohmann::json::object();
        case Opcode::LDR2: engine.load_reg2(make_word(ins, ins.get("value", 0))); return nlohmann::json::object();
        case Opcode::VMACRT:
            return result_json(engine.vmacrt(as_index(ins.get("addr", 0), "addr"), fused_options(ins)));
        case Opcode::VRED:
            return result_json(engine.vred(as_index(ins.get("addr", 0), "addr"), fused_options(ins)));
        case Opcode::STOUT:
            if (ins.get("lwsm", 0) != 0) {
                const auto& res = engine.stout_lwsm();
                const auto& out = engine.outputs();
                std::vector<std::int64_t> probs(out.end() - static_cast<std::ptrdiff_t>(res.shifts.size()), out.end());
                return nlohmann::json{{"probs_fixed", probs},
                                      {"shifts", res.shifts},
                                      {"argmax", res.argmax},
                                      {"frac_bits", engine.lwsm_frac_bits()}};
            } else {
                std::optional<StoreTarget> target;
                if (ins.has("level")) {
                    target = StoreTarget{static_cast<MemLevel>(ins.get("level", 0)),
                                         as_index(ins.get("bank", 0), "bank"), as_index(ins.get("addr", 0), "addr")};
                }
                return nlohmann::json{{"value", engine.stout(target)}};
            }
        case Opcode::HALT: return nlohmann::json::object();
    }
    return nlohmann::json::object();
}

}  // namespace

ProgramRun run_program(const Program& program, Engine& engine, const CostTable& table) {
    ProgramRun run;
    for (std::size_t i = 0; i < program.instructions.size(); ++i) {
        const auto& ins = program.instructions[i];
        StepResult step;
        step.index = i;
        step.line = ins.line;
        step.op = ins.op;
        try {
            step.detail = execute(ins, engine);
        } catch (const ExecutionError&) {
            throw;
        } catch (const Error& e) {
            throw ExecutionError(e, i, engine.snapshot().dump());
        }
        const bool halt = ins.op == Opcode::HALT;
        run.steps.push_back(std::move(step));
        if (halt) break;
    }
    run.outputs = engine.outputs();
    run.report = account(engine.log(), engine.regs(), table);
    std::uint64_t base_instrs = 0;
    for (const auto& op : engine.log().ops()) base_instrs += baseline_instructions(op, table.baseline);
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : run.steps) {
        if (s.op == Opcode::VMACRT || s.op == Opcode::VRED || s.op == Opcode::STOUT) steps.push_back(to_json(s));
    }
    run.report.extra = nlohmann::json{{"results", steps},
                                      {"outputs", run.outputs},
                                      {"sparsity_monitor", to_json(engine.monitor())},
                                      {"baseline_instructions", base_instrs}};
    return run;
}

nlohmann::json to_json(const StepResult& s) {
    return nlohmann::json{
        {"index", s.index}, {"line", s.line}, {"op", std::string(to_string(s.op))}, {"result", s.detail}};
}

}  // namespace abisim
