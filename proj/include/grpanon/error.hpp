// Copyright 2026 The grpanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRPANON_ERROR_HPP
#define GRPANON_ERROR_HPP

#include <cstddef>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace grpanon {

// Base of everything the library throws on bad input or unsolvable problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Declared schema does not match the data (missing column, bad role, ...).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed delimited text. `row` is the 1-based data row (0 = header).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : ParseError(row, "row " + std::to_string(row) + ": " + what, 0) {}
  std::size_t row() const { return row_; }

  // Same error with the source file name prefixed.
  ParseError in_file(const std::string& file) const { return ParseError(row_, file + ": " + what(), 0); }

 private:
  ParseError(std::size_t row, const std::string& full, int) : Error(full), row_(row) {}
  std::size_t row_;
};

// Arguments violate an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// No point satisfies the requested constraints or swap targets.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class UnboundedError : public Error {
 public:
  using Error::Error;
};

// Sink for non-fatal diagnostics (dropped identifier columns, clamped values).
using WarningSink = std::function<void(const std::string&)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

inline void warn(const std::string& msg) {
  if (warning_sink()) warning_sink()(msg);
}

// Swaps the active sink for the lifetime of the guard.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink) : saved_(std::exchange(warning_sink(), std::move(sink))) {}
  ~ScopedWarningSink() { warning_sink() = std::move(saved_); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink saved_;
};

}  // namespace grpanon

#endif  // GRPANON_ERROR_HPP
