/*
 *  Copyright 2026 The npcl Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "npcl/error.hpp"

namespace npcl::detail {

class ByteWriter {
public:
    void u32_le(std::uint32_t v) { put_le(v, 4); }
    void u64_le(std::uint64_t v) { put_le(v, 8); }
    void f64_le(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }

    std::vector<std::uint8_t>& bytes() { return bytes_; }

private:
    void put_le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string source)
        : bytes_(bytes), source_(std::move(source)) {}

    std::uint32_t u32_be() { return static_cast<std::uint32_t>(get(4, false)); }
    std::uint32_t u32_le() { return static_cast<std::uint32_t>(get(4, true)); }
    std::uint64_t u64_le() { return get(8, true); }
    double f64_le() { return std::bit_cast<double>(get(8, true)); }
    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1, true)); }

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    void require(std::size_t count) const {
        if (remaining() < count)
            throw ParseError(ParseError::Kind::Truncated, pos_,
                             source_ + ": truncated at offset " + std::to_string(pos_) + " (need " +
                                 std::to_string(count) + " more bytes, have " +
                                 std::to_string(remaining()) + ")");
    }

private:
    std::uint64_t get(int width, bool little) {
        require(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            const std::uint64_t b = bytes_[pos_ + static_cast<std::size_t>(i)];
            v |= little ? b << (8 * i) : b << (8 * (width - 1 - i));
        }
        pos_ += static_cast<std::size_t>(width);
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

}  // namespace npcl::detail
