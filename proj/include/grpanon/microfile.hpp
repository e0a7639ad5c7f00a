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

#ifndef GRPANON_MICROFILE_HPP
#define GRPANON_MICROFILE_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "grpanon/csv.hpp"
#include "grpanon/error.hpp"

namespace grpanon {

enum class AttributeKind { ordinal, nominal };
enum class AttributeRole { vital, parameter, influential, plain };

inline std::string_view to_string(AttributeKind k) {
  return k == AttributeKind::ordinal ? "ordinal" : "nominal";
}

inline std::string_view to_string(AttributeRole r) {
  switch (r) {
    case AttributeRole::vital: return "vital";
    case AttributeRole::parameter: return "parameter";
    case AttributeRole::influential: return "influential";
    case AttributeRole::plain: return "plain";
  }
  return "?";
}

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::nominal;
  AttributeRole role = AttributeRole::plain;
  // Influential-metric weight (zeta for ordinal, gamma for nominal). Vital
  // attributes always take part in the metric.
  double weight = 0.0;

  bool influential() const {
    return role == AttributeRole::influential || role == AttributeRole::vital;
  }
  bool operator==(const Attribute&) const = default;
};

// One column of the ingestion schema. Identifier columns are dropped on load.
struct AttributeDecl {
  Attribute attribute;
  bool identifier = false;
};

using Schema = std::vector<AttributeDecl>;

namespace detail {

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Rectangular table of respondent records. Column-major; keeps the original
// text of every cell and, for ordinal columns, its parsed value. Immutable once
// built: modifications produce a new Microfile.
class Microfile {
 public:
  Microfile() = default;

  Microfile(std::vector<Attribute> attributes, std::vector<std::vector<std::string>> columns)
      : attributes_(std::move(attributes)), text_(std::move(columns)) {
    if (attributes_.size() != text_.size())
      throw SchemaError("attribute count does not match column count");
    std::unordered_set<std::string> seen;
    for (const auto& a : attributes_) {
      if (a.name.empty()) throw SchemaError("attribute with empty name");
      if (!seen.insert(a.name).second) throw SchemaError("duplicate attribute '" + a.name + "'");
      if (a.weight < 0.0 || !std::isfinite(a.weight))
        throw SchemaError("attribute '" + a.name + "' has a negative or non-finite weight");
    }
    rows_ = text_.empty() ? 0 : text_.front().size();
    numbers_.resize(text_.size());
    for (std::size_t c = 0; c < text_.size(); ++c) {
      if (text_[c].size() != rows_) throw SchemaError("column '" + attributes_[c].name + "' is ragged");
      const Attribute& a = attributes_[c];
      const bool required = a.role != AttributeRole::plain;
      if (a.kind == AttributeKind::ordinal) numbers_[c].resize(rows_);
      for (std::size_t r = 0; r < rows_; ++r) {
        const std::string& cell = text_[c][r];
        if (cell.empty()) {
          if (required)
            throw ParseError(r + 1, "empty value in " + std::string(to_string(a.role)) + " column '" + a.name + "'");
          if (a.kind == AttributeKind::ordinal) numbers_[c][r] = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        if (a.kind == AttributeKind::ordinal) {
          auto v = detail::parse_number(cell);
          if (!v) throw ParseError(r + 1, "non-numeric value '" + cell + "' in ordinal column '" + a.name + "'");
          numbers_[c][r] = *v;
        }
      }
    }
  }

  std::size_t size() const { return rows_; }
  std::size_t width() const { return attributes_.size(); }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t col) const { return attributes_.at(col); }

  std::optional<std::size_t> find_column(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      if (attributes_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t column_index(std::string_view name) const {
    if (auto i = find_column(name)) return *i;
    throw SchemaError("unknown attribute '" + std::string(name) + "'");
  }

  const std::string& text(std::size_t row, std::size_t col) const { return text_[col][row]; }

  // Parsed value of an ordinal cell (NaN for an empty plain cell).
  double number(std::size_t row, std::size_t col) const { return numbers_[col][row]; }

  const std::vector<std::string>& column(std::size_t col) const { return text_.at(col); }

  // Copy with the cells of column `col` exchanged between each index pair.
  Microfile with_swapped_cells(std::size_t col, std::span<const std::pair<std::size_t, std::size_t>> pairs) const {
    Microfile out = *this;
    for (auto [a, b] : pairs) {
      if (a >= rows_ || b >= rows_) throw DomainError("swap index out of range");
      std::swap(out.text_[col][a], out.text_[col][b]);
      if (!out.numbers_[col].empty()) std::swap(out.numbers_[col][a], out.numbers_[col][b]);
    }
    return out;
  }

  bool operator==(const Microfile& o) const {
    return rows_ == o.rows_ && attributes_ == o.attributes_ && text_ == o.text_;
  }

 private:
  std::vector<Attribute> attributes_;
  std::vector<std::vector<std::string>> text_;
  std::vector<std::vector<double>> numbers_;
  std::size_t rows_ = 0;
};

// Accepted values for one attribute: literal values, plus inclusive numeric
// ranges (ordinal attributes only). Literals are compared numerically for
// ordinal attributes, textually for nominal ones.
struct ValueSet {
  std::vector<std::string> values;
  std::vector<std::pair<double, double>> ranges;

  bool matches(const Microfile& m, std::size_t row, std::size_t col) const {
    if (m.attribute(col).kind == AttributeKind::nominal) {
      const std::string& t = m.text(row, col);
      return std::find(values.begin(), values.end(), t) != values.end();
    }
    const double x = m.number(row, col);
    if (std::isnan(x)) return false;
    for (auto [lo, hi] : ranges)
      if (x >= lo && x <= hi) return true;
    for (const auto& v : values)
      if (auto p = detail::parse_number(v); p && *p == x) return true;
    return false;
  }

  bool operator==(const ValueSet&) const = default;
};

struct VitalCondition {
  std::string attribute;
  ValueSet accepted;
  bool operator==(const VitalCondition&) const = default;
};

// A protected group G(V, P): vital value combinations, the parameter attribute
// and its ordered values, and optionally the wider population used as the
// concentration denominator.
struct GroupSpec {
  std::string id;
  std::vector<VitalCondition> vital;
  std::string parameter;
  std::vector<std::string> parameter_order;
  std::optional<std::vector<VitalCondition>> superset;

  std::size_t length() const { return parameter_order.size(); }
};

// Indices of records satisfying every condition (all records for an empty list).
inline std::vector<std::size_t> matching_records(const Microfile& m, std::span<const VitalCondition> conditions) {
  std::vector<std::pair<std::size_t, const ValueSet*>> cols;
  cols.reserve(conditions.size());
  for (const auto& c : conditions) cols.emplace_back(m.column_index(c.attribute), &c.accepted);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < m.size(); ++r) {
    bool ok = true;
    for (auto [col, set] : cols) {
      if (!set->matches(m, r, col)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(r);
  }
  return out;
}

inline std::vector<std::size_t> members(const Microfile& m, const GroupSpec& g) {
  return matching_records(m, g.vital);
}

// Records of the denominator population; every record when no superset is given.
inline std::vector<std::size_t> superset_members(const Microfile& m, const GroupSpec& g) {
  if (!g.superset) return matching_records(m, {});
  return matching_records(m, *g.superset);
}

// Checks the structural invariants of `g` against `m`. Throws SchemaError for
// unknown or mis-roled attributes and DomainError for data-dependent
// violations (group not contained in its superset).
inline void validate_group(const Microfile& m, const GroupSpec& g) {
  const std::string where = "group '" + g.id + "': ";
  const std::size_t pcol = m.find_column(g.parameter).value_or(m.width());
  if (pcol == m.width()) throw SchemaError(where + "unknown parameter attribute '" + g.parameter + "'");
  if (m.attribute(pcol).role != AttributeRole::parameter)
    throw SchemaError(where + "attribute '" + g.parameter + "' is not declared with role parameter");
  for (const auto& v : g.vital) {
    if (v.attribute == g.parameter) throw SchemaError(where + "parameter attribute cannot also be vital");
    if (!m.find_column(v.attribute)) throw SchemaError(where + "unknown vital attribute '" + v.attribute + "'");
  }
  if (g.superset)
    for (const auto& v : *g.superset)
      if (!m.find_column(v.attribute)) throw SchemaError(where + "unknown superset attribute '" + v.attribute + "'");
  if (g.parameter_order.size() < 4) throw DomainError(where + "needs at least 4 parameter values");
  std::unordered_set<std::string> distinct(g.parameter_order.begin(), g.parameter_order.end());
  if (distinct.size() != g.parameter_order.size()) throw DomainError(where + "parameter values are not distinct");
  if (g.superset) {
    auto sup = superset_members(m, g);
    auto mem = members(m, g);
    if (!std::includes(sup.begin(), sup.end(), mem.begin(), mem.end()))
      throw DomainError(where + "some group members fall outside the superset population");
  }
}

inline Microfile read_microfile(std::istream& in, const Schema& schema) {
  std::vector<std::string> header;
  if (!csv::read_record(in, header, 0)) throw ParseError(0, "empty file (no header row)");

  std::unordered_map<std::string, const AttributeDecl*> declared;
  for (const auto& d : schema) {
    if (!declared.emplace(d.attribute.name, &d).second)
      throw SchemaError("attribute '" + d.attribute.name + "' declared twice");
  }
  std::unordered_set<std::string> in_header;
  for (const auto& h : header) {
    if (!in_header.insert(h).second) throw ParseError(0, "duplicate header column '" + h + "'");
  }
  for (const auto& d : schema)
    if (!in_header.count(d.attribute.name))
      throw SchemaError("declared column '" + d.attribute.name + "' missing from header");

  std::vector<std::size_t> keep;
  std::vector<Attribute> attributes;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto it = declared.find(header[i]);
    if (it != declared.end() && it->second->identifier) {
      warn("dropping identifier column '" + header[i] + "'");
      continue;
    }
    keep.push_back(i);
    if (it != declared.end()) {
      attributes.push_back(it->second->attribute);
    } else {
      attributes.push_back(Attribute{header[i], AttributeKind::nominal, AttributeRole::plain, 0.0});
    }
  }

  std::vector<std::vector<std::string>> columns(keep.size());
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (csv::read_record(in, fields, row + 1)) {
    ++row;
    if (fields.size() != header.size())
      throw ParseError(row, "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) columns[k].push_back(std::move(fields[keep[k]]));
  }
  return Microfile(std::move(attributes), std::move(columns));
}

inline Microfile load_microfile(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return read_microfile(in, schema);
  } catch (const ParseError& e) {
    throw e.in_file(path.string());
  }
}

inline void write_microfile(const Microfile& m, std::ostream& out) {
  std::vector<std::string> fields;
  for (const auto& a : m.attributes()) fields.push_back(a.name);
  csv::write_record(out, fields);
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m.width(); ++c) fields[c] = m.text(r, c);
    csv::write_record(out, fields);
  }
}

inline void write_microfile(const Microfile& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_microfile(m, out);
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace grpanon

#endif  // GRPANON_MICROFILE_HPP
