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

#include "abisim/isa.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>

#include "abisim/errors.hpp"
#include "abisim/prog_regs.hpp"

namespace abisim {

namespace {

constexpr std::array<std::string_view, 8> kOpcodeNames{"PRSET", "LDM",   "LDR",   "LDR2",
                                                       "VMACRT", "VRED", "STOUT", "HALT"};

enum class ValueKind { Int, IntList, Level, BitMode, ElemMode, ThFunc, Flag };

struct FieldRule {
    std::string_view key;
    ValueKind kind;
    bool required;
};

struct OpRules {
    std::vector<FieldRule> fields;
};

const OpRules& rules_for(Opcode op) {
    static const std::array<OpRules, 8> table{{
        {{}},  // PRSET: any register field, checked separately
        {{{"level", ValueKind::Level, true},
          {"bank", ValueKind::Int, true},
          {"addr", ValueKind::Int, true},
          {"value", ValueKind::Int, true},
          {"width", ValueKind::Int, false},
          {"spin", ValueKind::Flag, false}}},
        {{{"bank", ValueKind::Int, false},
          {"value", ValueKind::Int, false},
          {"values", ValueKind::IntList, false},
          {"width", ValueKind::Int, false},
          {"spin", ValueKind::Flag, false}}},
        {{{"value", ValueKind::Int, true}, {"width", ValueKind::Int, false}}},
        {{{"addr", ValueKind::Int, true},
          {"acc", ValueKind::Int, false},
          {"chain", ValueKind::Flag, false},
          {"sub", ValueKind::Flag, false},
          {"ref", ValueKind::Int, false},
          {"partial", ValueKind::Flag, false},
          {"th", ValueKind::ThFunc, false}}},
        {{{"addr", ValueKind::Int, true},
          {"acc", ValueKind::Int, false},
          {"chain", ValueKind::Flag, false},
          {"sub", ValueKind::Flag, false},
          {"ref", ValueKind::Int, false},
          {"partial", ValueKind::Flag, false},
          {"th", ValueKind::ThFunc, false}}},
        {{{"level", ValueKind::Level, false},
          {"bank", ValueKind::Int, false},
          {"addr", ValueKind::Int, false},
          {"lwsm", ValueKind::Flag, false}}},
        {{}},
    }};
    return table[static_cast<std::size_t>(op)];
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
    bool neg = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        neg = text.front() == '-';
        text.remove_prefix(1);
    }
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        text.remove_prefix(2);
    } else if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B')) {
        base = 2;
        text.remove_prefix(2);
    }
    if (text.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return neg ? -v : v;
}

std::optional<std::int64_t> parse_symbol(ValueKind kind, std::string_view text) {
    const std::string t = lower(text);
    switch (kind) {
        case ValueKind::Level:
            if (auto l = parse_level(t)) return static_cast<std::int64_t>(*l);
            break;
        case ValueKind::BitMode:
            if (t == "bp") return 0;
            if (t == "bs") return 1;
            break;
        case ValueKind::ElemMode:
            if (t == "ep") return 0;
            if (t == "es") return 1;
            break;
        case ValueKind::ThFunc:
            if (t == "bypass") return static_cast<std::int64_t>(ThMode::Bypass);
            if (t == "relu") return static_cast<std::int64_t>(ThMode::Relu);
            if (t == "cmp" || t == "compare") return static_cast<std::int64_t>(ThMode::Compare);
            if (t == "softmax") return static_cast<std::int64_t>(ThMode::Softmax);
            break;
        default: break;
    }
    return std::nullopt;
}

ValueKind prset_kind(std::string_view field) {
    if (field == "nrf_m") return ValueKind::Level;
    if (field == "bit_mode") return ValueKind::BitMode;
    if (field == "elem_mode") return ValueKind::ElemMode;
    return ValueKind::Int;
}

Operand decode_operand(std::string_view token, Opcode op, std::size_t line) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == token.size()) {
        throw AssemblyError("BadOperand", line, "expected key=value, got '" + std::string(token) + "'");
    }
    Operand o;
    o.key = lower(token.substr(0, eq));
    o.text = std::string(token.substr(eq + 1));

    ValueKind kind = ValueKind::Int;
    if (op == Opcode::PRSET) {
        const auto& names = prog_reg_fields();
        if (std::find(names.begin(), names.end(), o.key) == names.end()) {
            throw AssemblyError("BadOperand", line, "unknown register field '" + o.key + "'");
        }
        kind = prset_kind(o.key);
    } else {
        const auto& fields = rules_for(op).fields;
        auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldRule& r) { return r.key == o.key; });
        if (it == fields.end()) {
            throw AssemblyError("BadOperand", line,
                                "field '" + o.key + "' not accepted by " + std::string(to_string(op)));
        }
        kind = it->kind;
    }

    auto bad_value = [&] {
        return AssemblyError("BadOperand", line, "bad value '" + o.text + "' for field '" + o.key + "'");
    };
    if (kind == ValueKind::IntList) {
        std::string_view rest = o.text;
        while (true) {
            const auto comma = rest.find(',');
            auto v = parse_int(rest.substr(0, comma));
            if (!v) throw bad_value();
            o.values.push_back(*v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return o;
    }
    if (auto v = parse_int(o.text)) {
        if (kind == ValueKind::Flag && *v != 0 && *v != 1) throw bad_value();
        if (kind == ValueKind::ThFunc) throw bad_value();
        o.values.push_back(*v);
        return o;
    }
    if (auto v = parse_symbol(kind, o.text)) {
        o.values.push_back(*v);
        return o;
    }
    throw bad_value();
}

void check_required(const Instruction& ins) {
    if (ins.op == Opcode::PRSET) {
        if (ins.operands.empty()) throw AssemblyError("BadOperand", ins.line, "PRSET needs at least one field");
        return;
    }
    for (const auto& r : rules_for(ins.op).fields) {
        if (r.required && !ins.has(r.key)) {
            throw AssemblyError("BadOperand", ins.line,
                                std::string(to_string(ins.op)) + " requires field '" + std::string(r.key) + "'");
        }
    }
    if (ins.op == Opcode::LDR) {
        const bool vec = ins.has("values");
        const bool single = ins.has("value");
        if (vec == single) throw AssemblyError("BadOperand", ins.line, "LDR takes exactly one of value= or values=");
        if (single && !ins.has("bank")) throw AssemblyError("BadOperand", ins.line, "LDR value= requires bank=");
        if (vec && ins.has("bank")) throw AssemblyError("BadOperand", ins.line, "LDR values= loads every bank");
    }
    if (ins.op == Opcode::STOUT) {
        const int targets = ins.has("level") + ins.has("bank") + ins.has("addr");
        if (targets != 0 && targets != 3) {
            throw AssemblyError("BadOperand", ins.line, "STOUT memory target needs level, bank and addr");
        }
        if (targets == 3 && ins.get("lwsm", 0) != 0) {
            throw AssemblyError("BadOperand", ins.line, "STOUT lwsm=1 cannot write to memory");
        }
    }
    if ((ins.op == Opcode::VMACRT || ins.op == Opcode::VRED) && ins.has("acc") && ins.get("chain", 0) != 0) {
        throw AssemblyError("BadOperand", ins.line, "acc= and chain=1 are exclusive");
    }
}

bool is_label_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

std::string_view to_string(Opcode op) noexcept { return kOpcodeNames[static_cast<std::size_t>(op)]; }

std::optional<Opcode> parse_opcode(std::string_view name) noexcept {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (std::size_t i = 0; i < kOpcodeNames.size(); ++i) {
        if (kOpcodeNames[i] == upper) return static_cast<Opcode>(i);
    }
    return std::nullopt;
}

const Operand* Instruction::find(std::string_view key) const noexcept {
    for (const auto& o : operands) {
        if (o.key == key) return &o;
    }
    return nullptr;
}

std::int64_t Instruction::get(std::string_view key, std::int64_t fallback) const {
    const auto* o = find(key);
    return o ? o->value() : fallback;
}

Program assemble(std::string_view source) {
    Program prog;
    std::size_t line_no = 0;
    std::size_t last_line = 0;
    bool halted = false;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        const auto nl = source.find('\n', pos);
        std::string_view line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            if (line.substr(hash).starts_with("#@")) {
                auto note = line.substr(hash + 2);
                while (!note.empty() && std::isspace(static_cast<unsigned char>(note.front()))) note.remove_prefix(1);
                while (!note.empty() && std::isspace(static_cast<unsigned char>(note.back()))) note.remove_suffix(1);
                prog.notes.emplace_back(note);
            }
            line = line.substr(0, hash);
        }
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        last_line = line_no;

        // Optional leading label.
        if (tokens.front().back() == ':') {
            const auto name = tokens.front().substr(0, tokens.front().size() - 1);
            if (name.empty() || !std::all_of(name.begin(), name.end(), is_label_char)) {
                throw AssemblyError("BadOperand", line_no, "bad label '" + std::string(tokens.front()) + "'");
            }
            if (!prog.labels.emplace(std::string(name), prog.instructions.size()).second) {
                throw AssemblyError("BadOperand", line_no, "duplicate label '" + std::string(name) + "'");
            }
            tokens.erase(tokens.begin());
            if (tokens.empty()) continue;
        }
        if (halted) throw AssemblyError("BadOperand", line_no, "instruction after HALT");

        const auto op = parse_opcode(tokens.front());
        if (!op) throw AssemblyError("UnknownOpcode", line_no, "unknown opcode '" + std::string(tokens.front()) + "'");
        Instruction ins;
        ins.op = *op;
        ins.line = line_no;
        std::set<std::string> seen;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            auto operand = decode_operand(tokens[i], *op, line_no);
            if (!seen.insert(operand.key).second) {
                throw AssemblyError("BadOperand", line_no, "duplicate field '" + operand.key + "'");
            }
            ins.operands.push_back(std::move(operand));
        }
        if (*op == Opcode::HALT) {
            if (!ins.operands.empty()) throw AssemblyError("BadOperand", line_no, "HALT takes no operands");
            halted = true;
        }
        check_required(ins);
        prog.instructions.push_back(std::move(ins));
    }
    if (!halted) {
        throw AssemblyError("UnterminatedProgram", std::max<std::size_t>(last_line, 1), "program does not end with HALT");
    }
    return prog;
}

std::string disassemble(const Program& program) {
    std::multimap<std::size_t, std::string> labels_at;
    for (const auto& [name, index] : program.labels) labels_at.emplace(index, name);
    std::string out;
    for (const auto& note : program.notes) out += "#@ " + note + '\n';
    for (std::size_t i = 0; i <= program.instructions.size(); ++i) {
        auto [lo, hi] = labels_at.equal_range(i);
        for (auto it = lo; it != hi; ++it) out += it->second + ":\n";
        if (i == program.instructions.size()) break;
        const auto& ins = program.instructions[i];
        out += to_string(ins.op);
        for (const auto& o : ins.operands) out += ' ' + o.key + '=' + o.text;
        out += '\n';
    }
    return out;
}

}  // namespace abisim
