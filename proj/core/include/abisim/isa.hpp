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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abisim {

enum class Opcode : std::uint8_t { PRSET, LDM, LDR, LDR2, VMACRT, VRED, STOUT, HALT };

[[nodiscard]] std::string_view to_string(Opcode op) noexcept;
[[nodiscard]] std::optional<Opcode> parse_opcode(std::string_view name) noexcept;

/// One `key=value` operand. `text` keeps the literal exactly as written so
/// disassembly reproduces the source tokens; `values` holds the decoded
/// integers (one per list element; symbolic names are decoded too).
struct Operand {
    std::string key;
    std::string text;
    std::vector<std::int64_t> values;

    [[nodiscard]] std::int64_t value() const { return values.front(); }
};

struct Instruction {
    Opcode op = Opcode::HALT;
    std::vector<Operand> operands;
    /// 1-based source line.
    std::size_t line = 0;

    [[nodiscard]] const Operand* find(std::string_view key) const noexcept;
    [[nodiscard]] bool has(std::string_view key) const noexcept { return find(key) != nullptr; }
    /// Integer value of `key`, or `fallback` when absent.
    [[nodiscard]] std::int64_t get(std::string_view key, std::int64_t fallback) const;
};

struct Program {
    std::vector<Instruction> instructions;
    /// label -> index of the instruction that follows it.
    std::map<std::string, std::size_t> labels;
    /// Annotation comments (`#@ text`), echoed into run reports.
    std::vector<std::string> notes;
};

/// Assembles `.abi` source.
///
/// Grammar, one statement per line:
///
///     [label:] OPCODE key=value key=value ...   # comment
///
/// Values are decimal, 0b or 0x integers (optionally negative), comma
/// separated lists for `values=`, or symbols where a field takes one
/// (levels rf/l1/l2, bit modes bp/bs, element modes ep/es, TH functions
/// bypass/relu/cmp/softmax). The program must end with HALT. Comments of
/// the form `#@ text` are kept as program notes.
///
/// Errors (AssemblyError, carrying the line): UnknownOpcode, BadOperand,
/// UnterminatedProgram.
[[nodiscard]] Program assemble(std::string_view source);

/// Canonical text: one instruction per line, labels on their own line,
/// operands in source order with their original literal text.
[[nodiscard]] std::string disassemble(const Program& program);

}  // namespace abisim
