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

#ifndef GRPANON_CSV_HPP
#define GRPANON_CSV_HPP

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "grpanon/error.hpp"

namespace grpanon::csv {

// Reads one logical CSV record (which may span physical lines when a quoted
// field contains a newline). Returns false at end of input. `row` is only used
// for error messages.
inline bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t row) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      if (!field.empty() || field_was_quoted) throw ParseError(row, "stray quote inside unquoted field");
      in_quotes = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\n') {
      break;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else {
      if (field_was_quoted) throw ParseError(row, "characters after closing quote");
      field.push_back(ch);
    }
  }
  if (in_quotes) throw ParseError(row, "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

inline bool needs_quoting(std::string_view s) {
  if (s.empty()) return false;
  if (s.front() == ' ' || s.back() == ' ') return true;
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void write_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace grpanon::csv

#endif  // GRPANON_CSV_HPP
