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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abisim {

/// Root of every error the simulator raises. `kind()` is a stable
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define ABI_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    };

ABI_DEFINE_ERROR(RangeError)
ABI_DEFINE_ERROR(ConfigError)
ABI_DEFINE_ERROR(AddressError)
ABI_DEFINE_ERROR(ResolutionError)
ABI_DEFINE_ERROR(DivideByZeroError)
ABI_DEFINE_ERROR(OverflowError)
ABI_DEFINE_ERROR(EmptyValueError)
ABI_DEFINE_ERROR(SchemaError)
ABI_DEFINE_ERROR(ComparisonError)
ABI_DEFINE_ERROR(FileNotFound)

#undef ABI_DEFINE_ERROR

/// Assembler diagnostics carry the 1-based source line.
class AssemblyError : public Error {
public:
    AssemblyError(std::string kind, std::size_t line, const std::string& what)
        : Error(std::move(kind), "line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Runtime failure while executing a program. Wraps the underlying error kind
/// and records the faulting instruction index plus an engine snapshot (JSON text).
class ExecutionError : public Error {
public:
    ExecutionError(const Error& cause, std::size_t instr_index, std::string snapshot)
        : Error(cause.kind(), "instruction " + std::to_string(instr_index) + ": " + cause.what()),
          index_(instr_index),
          snapshot_(std::move(snapshot)) {}

    [[nodiscard]] std::size_t instruction_index() const noexcept { return index_; }
    [[nodiscard]] const std::string& snapshot() const noexcept { return snapshot_; }

private:
    std::size_t index_;
    std::string snapshot_;
};

}  // namespace abisim
