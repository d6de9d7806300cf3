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
#include <optional>
#include <span>
#include <vector>

#include "abisim/event_log.hpp"
#include "abisim/prog_regs.hpp"
#include "abisim/word.hpp"

namespace abisim {

/// One storage level (RF, L1 or L2) organised as B equal-length banks.
/// A read addresses the same word in every bank and returns one word per
/// bank, which is how the sub-banks feed St0.
class BankedMemory {
public:
    BankedMemory(MemLevel level, std::size_t banks, std::size_t words_per_bank);

    [[nodiscard]] MemLevel level() const noexcept { return level_; }
    [[nodiscard]] std::size_t banks() const noexcept { return banks_; }
    [[nodiscard]] std::size_t words_per_bank() const noexcept { return words_; }

    /// Broadcast read of `word_index` across all banks; logs one read event.
    [[nodiscard]] std::vector<Word> read(std::size_t word_index, EventLog& log) const;
    /// Stores `w` at (bank, word_index); logs one write event.
    void write(std::size_t bank, std::size_t word_index, Word w, EventLog& log);

    /// Unlogged inspection for tests and report snapshots.
    [[nodiscard]] const Word& peek(std::size_t bank, std::size_t word_index) const;

private:
    void check(std::size_t bank, std::size_t word_index) const;

    MemLevel level_;
    std::size_t banks_;
    std::size_t words_;
    std::vector<Word> cells_;  // bank-major
};

/// Stationary-side operands: one REG word per bank plus the REG'' scalar that
/// feeds St4 and the scaler.
struct OperandRegs {
    std::vector<Word> reg;
    std::optional<Word> reg2;

    OperandRegs() = default;
    explicit OperandRegs(std::size_t banks) : reg(banks, Word::make(0)) {}
};

}  // namespace abisim
