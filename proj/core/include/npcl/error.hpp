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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace npcl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, shape, finiteness).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The request exceeds a hard size limit of the routine (e.g. exhaustive search).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the given input, e.g. precision over an empty selection.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A binary file was readable but malformed.
class ParseError : public Error {
public:
    enum class Kind { BadMagic, Truncated, CountMismatch, BadHeader };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : Error(what), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

}  // namespace npcl
