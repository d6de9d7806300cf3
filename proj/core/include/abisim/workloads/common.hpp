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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "abisim/engine.hpp"
#include "abisim/event_log.hpp"
#include "abisim/prog_regs.hpp"
#include "abisim/rng.hpp"
#include "abisim/word.hpp"

namespace abisim::workloads {

enum class WorkloadType : std::uint8_t { Cnn, Ising, Lp, Gcn, Attn };

[[nodiscard]] std::string_view to_string(WorkloadType t) noexcept;
/// Accepts "cnn", "ising", "lp", "gcn", "attn"; SchemaError otherwise.
[[nodiscard]] WorkloadType parse_workload_type(std::string_view name);
[[nodiscard]] const std::vector<WorkloadType>& all_workload_types() noexcept;

/// Where and how the kernel runs on the near-memory engine.
struct ExecMode {
    MemLevel level = MemLevel::RF;
    BitMode bit_mode = BitMode::Parallel;
    ElemMode elem_mode = ElemMode::Parallel;
    bool sp_act = false;
    std::uint32_t sp_window = 512;
    std::size_t banks = 8;

    friend bool operator==(const ExecMode&, const ExecMode&) = default;
};

/// Problem description shared by every workload. Type-specific sizes live in
/// `dims`, iteration controls in `schedule`; each workload parses its own keys
/// strictly.
struct WorkloadSpec {
    WorkloadType type = WorkloadType::Cnn;
    std::uint64_t seed = 1;
    /// Operand resolution of the main compute phase.
    int bit_wid = 4;
    /// Fraction of zero operands in the moving/sparse operand, in [0,1].
    double sparsity = 0.0;
    ExecMode mode;
    /// Independent random instances generated and run back to back.
    std::size_t instances = 1;
    nlohmann::json dims = nlohmann::json::object();
    nlohmann::json schedule = nlohmann::json::object();
};

/// Strict parse of {type, seed, bit_wid, sparsity, mode: {level, bit_mode,
/// elem_mode, sp_act, sp_window, banks}, instances, dims, schedule}.
[[nodiscard]] WorkloadSpec workload_spec_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const WorkloadSpec& spec);
/// Built-in desk-scale spec used when no spec file is given.
[[nodiscard]] WorkloadSpec default_spec(WorkloadType type);

/// What one workload run leaves behind.
struct WorkloadOutcome {
    std::string workload;
    std::uint64_t seed = 0;
    /// ABI event log and instruction trace of the timed kernel.
    EventLog log;
    ProgRegs final_regs;
    bool oracle_match = true;
    std::size_t instances = 0;
    /// Workload-specific results, oracle values and mismatch notes.
    nlohmann::json detail = nlohmann::json::object();
};

// --- helpers shared by the kernels -------------------------------------

/// Engine sized so that `rows` memory words per bank fit at `mode.level`,
/// with the ExecMode and bit width programmed through PRSET.
[[nodiscard]] Engine make_engine(const ExecMode& mode, int bit_wid, std::size_t rows);

/// PRSET bit_wid, also toggling St1 (only 1-bit compute may bypass it).
void set_bit_wid(Engine& engine, int bit_wid);

/// Programs the TH block for `mode` with PRSET writes (only fields that change).
void program_th(Engine& engine, ThMode mode);
/// Enables or disables the scaler.
void set_scaler(Engine& engine, bool on);

[[nodiscard]] constexpr std::size_t ceil_div(std::size_t a, std::size_t b) noexcept { return (a + b - 1) / b; }

/// Preloads `values` tiled over the banks into rows [first_row, first_row + tiles).
void preload_tiled(Engine& engine, std::size_t first_row, std::span<const std::int64_t> values);

/// Chained dot product of `reg_values` against memory rows [first_row,
/// first_row + tiles): every tile but the last is a partial op, every tile
/// but the first chains the accumulator. REG is loaded for each tile when
/// there are several, otherwise only if `reload` is set (REG already holds
/// the vector). Returns the last op's result.
const RceResult& tiled_dot(Engine& engine, std::size_t first_row, std::span<const std::int64_t> reg_values,
                           bool reload);

/// 16-bit words from integers (RangeError if any does not fit).
[[nodiscard]] std::vector<Word> to_words(std::span<const std::int64_t> values);

/// Slice [begin, begin+len) of `values`, zero padded to `len`.
[[nodiscard]] std::vector<std::int64_t> tile(std::span<const std::int64_t> values, std::size_t begin,
                                             std::size_t len);

/// Uniform integer in [-max_mag, max_mag], zero with probability `sparsity`.
[[nodiscard]] std::int64_t sparse_value(Rng& rng, std::int64_t max_mag, double sparsity);

/// Largest magnitude representable at `bit_wid` under the engine's
/// sign-magnitude St0: 2^bit_wid - 1.
[[nodiscard]] constexpr std::int64_t max_magnitude(int bit_wid) noexcept {
    return (std::int64_t{1} << bit_wid) - 1;
}

/// Smallest bit width whose magnitude range covers |v| for every v.
[[nodiscard]] int bits_for(std::span<const std::int64_t> values) noexcept;

/// Dense row-major integer matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    [[nodiscard]] std::int64_t& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    [[nodiscard]] std::int64_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    [[nodiscard]] std::span<const std::int64_t> row(std::size_t r) const {
        return std::span<const std::int64_t>(data).subspan(r * cols, cols);
    }
    [[nodiscard]] std::vector<std::int64_t> column(std::size_t c) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

[[nodiscard]] nlohmann::json to_json(const Matrix& m);

/// Reference LWSM pipeline on integer scores: normalize, then shift-softmax;
/// returns the Q0.frac probabilities.
[[nodiscard]] std::vector<std::int64_t> lwsm_reference(std::span<const std::int64_t> scores, int frac_bits = 8);

/// Typed accessors for the strict dims/schedule objects.
class ParamReader {
public:
    ParamReader(const nlohmann::json& obj, std::string section);

    [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback, std::int64_t lo,
                                       std::int64_t hi);
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback);
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback);
    /// SchemaError naming the first key that no getter asked for.
    void finish() const;

private:
    const nlohmann::json& obj_;
    std::string section_;
    std::vector<std::string> used_;
};

}  // namespace abisim::workloads
