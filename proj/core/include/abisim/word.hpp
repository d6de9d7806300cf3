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
#include <string>

#include "abisim/errors.hpp"

namespace abisim {

/// How a stored bit pattern maps to an integer.
///  - TwosComplement: ordinary signed encoding for widths >= 2.
///  - Binary: width-1 raw bit read as {0, 1}.
///  - Spin: width-1 raw bit b read as sigma = 2b - 1, i.e. {-1, +1}.
enum class Encoding : std::uint8_t { TwosComplement, Binary, Spin };

/// Fixed-point word of 1..16 bits. Stores the raw bit pattern; `value()`
/// applies the declared encoding.
class Word {
public:
    static constexpr int kMaxWidth = 16;

    constexpr Word() = default;

    /// Two's-complement word (width >= 2), or a Binary bit for width 1.
    static Word make(std::int32_t value, int width = kMaxWidth);
    /// Width-1 spin word holding sigma in {-1, +1}.
    static Word spin(int sigma);

    [[nodiscard]] std::int32_t value() const noexcept;
    [[nodiscard]] std::uint16_t raw() const noexcept { return raw_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] Encoding encoding() const noexcept { return encoding_; }

    [[nodiscard]] static bool representable(std::int64_t value, int width) noexcept;

    friend bool operator==(const Word&, const Word&) = default;

private:
    constexpr Word(std::uint16_t raw, std::uint8_t width, Encoding enc)
        : raw_(raw), width_(width), encoding_(enc) {}

    std::uint16_t raw_ = 0;
    std::uint8_t width_ = kMaxWidth;
    Encoding encoding_ = Encoding::TwosComplement;
};


inline std::int32_t Word::value() const noexcept {
    switch (encoding_) {
        case Encoding::Binary: return raw_ & 1;
        case Encoding::Spin: return (raw_ & 1) ? 1 : -1;
        case Encoding::TwosComplement: break;
    }
    const std::uint32_t sign_bit = 1u << (width_ - 1);
    const std::uint32_t r = raw_;
    return (r & sign_bit) ? static_cast<std::int32_t>(r) - static_cast<std::int32_t>(sign_bit << 1)
                          : static_cast<std::int32_t>(r);
}

inline bool Word::representable(std::int64_t value, int width) noexcept {
    if (width < 1 || width > kMaxWidth) return false;
    if (width == 1) return value == 0 || value == 1;
    const std::int64_t lo = -(std::int64_t{1} << (width - 1));
    const std::int64_t hi = (std::int64_t{1} << (width - 1)) - 1;
    return value >= lo && value <= hi;
}

inline Word Word::make(std::int32_t value, int width) {
    if (!representable(value, width)) {
        throw RangeError("value " + std::to_string(value) + " not representable in " +
                         std::to_string(width) + " bits");
    }
    if (width == 1) return Word(static_cast<std::uint16_t>(value), 1, Encoding::Binary);
    const std::uint32_t mask = (1u << width) - 1u;
    return Word(static_cast<std::uint16_t>(static_cast<std::uint32_t>(value) & mask),
                static_cast<std::uint8_t>(width), Encoding::TwosComplement);
}

inline Word Word::spin(int sigma) {
    if (sigma != 1 && sigma != -1) {
        throw RangeError("spin must be -1 or +1, got " + std::to_string(sigma));
    }
    return Word(sigma > 0 ? 1 : 0, 1, Encoding::Spin);
}

}  // namespace abisim
