/*
 * Copyright 2026 The partsim Authors
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
#include <stdexcept>
#include <string>

namespace partsim {

/// Base class for all partsim errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    ParseError(std::size_t line_no, const std::string& msg)
        : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    std::size_t line;
};

namespace detail {

/// Shortest round-trip decimal representation of a double (stable across runs).
std::string format_double(double v);

/// Fixed-point seconds with 9 fractional digits, used for trace timestamps.
std::string format_time(double seconds);

}  // namespace detail

}  // namespace partsim
