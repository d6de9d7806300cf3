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

#include "abisim/banked_memory.hpp"

#include <string>

namespace abisim {

BankedMemory::BankedMemory(MemLevel level, std::size_t banks, std::size_t words_per_bank)
    : level_(level), banks_(banks), words_(words_per_bank), cells_(banks * words_per_bank, Word::make(0)) {
    if (banks == 0) throw ConfigError("memory needs at least one bank");
    if (words_per_bank == 0) throw ConfigError("memory needs at least one word per bank");
}

void BankedMemory::check(std::size_t bank, std::size_t word_index) const {
    if (bank >= banks_) {
        throw AddressError("bank " + std::to_string(bank) + " out of range (banks=" +
                           std::to_string(banks_) + ")");
    }
    if (word_index >= words_) {
        throw AddressError("word " + std::to_string(word_index) + " out of range (words=" +
                           std::to_string(words_) + ") at " + std::string(to_string(level_)));
    }
}

std::vector<Word> BankedMemory::read(std::size_t word_index, EventLog& log) const {
    check(0, word_index);
    std::vector<Word> row;
    row.reserve(banks_);
    for (std::size_t b = 0; b < banks_; ++b) row.push_back(cells_[b * words_ + word_index]);
    log.record_access({AccessKind::Read, level_, 0, static_cast<std::uint32_t>(word_index)});
    return row;
}

void BankedMemory::write(std::size_t bank, std::size_t word_index, Word w, EventLog& log) {
    check(bank, word_index);
    cells_[bank * words_ + word_index] = w;
    log.record_access({AccessKind::Write, level_, static_cast<std::uint32_t>(bank),
                       static_cast<std::uint32_t>(word_index)});
}

const Word& BankedMemory::peek(std::size_t bank, std::size_t word_index) const {
    check(bank, word_index);
    return cells_[bank * words_ + word_index];
}

}  // namespace abisim
