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

#ifndef GRPANON_GOAL_SIGNAL_HPP
#define GRPANON_GOAL_SIGNAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grpanon/apportion.hpp"
#include "grpanon/error.hpp"
#include "grpanon/microfile.hpp"

namespace grpanon {

enum class SignalKind { quantity, concentration, difference };

inline std::string_view to_string(SignalKind k) {
  switch (k) {
    case SignalKind::quantity: return "quantity";
    case SignalKind::concentration: return "concentration";
    case SignalKind::difference: return "difference";
  }
  return "?";
}

// One-dimensional goal representation of a group, aligned with the group's
// ordered parameter values.
struct GoalSignal {
  SignalKind kind = SignalKind::quantity;
  std::vector<double> values;
  std::vector<std::string> parameter_order;
  // Superset counts per position; populated for concentration signals.
  std::vector<double> denominators;

  std::size_t size() const { return values.size(); }
};

// Maps a record to the position of its parameter value in the group's order.
// Ordinal parameters compare numerically, nominal ones textually.
class ParameterIndex {
 public:
  ParameterIndex(const Microfile& m, const GroupSpec& g) : m_(&m), col_(m.column_index(g.parameter)) {
    ordinal_ = m.attribute(col_).kind == AttributeKind::ordinal;
    for (std::size_t i = 0; i < g.parameter_order.size(); ++i) {
      const std::string& v = g.parameter_order[i];
      if (ordinal_) {
        auto x = detail::parse_number(v);
        if (!x) throw SchemaError("parameter value '" + v + "' is not numeric but '" + g.parameter + "' is ordinal");
        by_number_.emplace(*x, i);
      } else {
        by_text_.emplace(v, i);
      }
    }
  }

  std::optional<std::size_t> operator()(std::size_t row) const {
    if (ordinal_) {
      auto it = by_number_.find(m_->number(row, col_));
      if (it == by_number_.end()) return std::nullopt;
      return it->second;
    }
    auto it = by_text_.find(m_->text(row, col_));
    if (it == by_text_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t column() const { return col_; }

 private:
  const Microfile* m_;
  std::size_t col_;
  bool ordinal_ = false;
  std::unordered_map<std::string, std::size_t> by_text_;
  std::map<double, std::size_t> by_number_;
};

// q_i = number of group members whose parameter value is parameter_order[i].
inline GoalSignal quantity_signal(const Microfile& m, const GroupSpec& g) {
  ParameterIndex index(m, g);
  GoalSignal out{SignalKind::quantity, std::vector<double>(g.length(), 0.0), g.parameter_order, {}};
  std::set<std::string> offending;
  for (std::size_t r : members(m, g)) {
    if (auto pos = index(r)) {
      out.values[*pos] += 1.0;
    } else {
      offending.insert(m.text(r, index.column()));
    }
  }
  if (!offending.empty()) {
    std::string list;
    for (const auto& v : offending) list += (list.empty() ? "'" : ", '") + v + "'";
    throw DomainError("group '" + g.id + "' has members with parameter values outside the declared order: " + list);
  }
  return out;
}

// Counts of superset records per parameter position (rho). Superset records
// whose parameter value is outside the order are not counted.
inline std::vector<double> superset_counts(const Microfile& m, const GroupSpec& g) {
  ParameterIndex index(m, g);
  std::vector<double> rho(g.length(), 0.0);
  for (std::size_t r : superset_members(m, g))
    if (auto pos = index(r)) rho[*pos] += 1.0;
  return rho;
}

// c_i = q_i / rho_i with rho counted over the group's superset population.
inline GoalSignal concentration_signal(const Microfile& m, const GroupSpec& g) {
  if (!g.superset) throw DomainError("group '" + g.id + "' has no superset; concentration is undefined");
  GoalSignal q = quantity_signal(m, g);
  std::vector<double> rho = superset_counts(m, g);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] <= 0.0)
      throw DomainError("group '" + g.id + "': superset is empty at parameter value '" + g.parameter_order[i] + "'");
  GoalSignal out{SignalKind::concentration, q.values, g.parameter_order, rho};
  for (std::size_t i = 0; i < rho.size(); ++i) out.values[i] /= rho[i];
  return out;
}

inline GoalSignal difference_signal(const GoalSignal& main, const GoalSignal& subordinate) {
  if (main.kind != SignalKind::concentration || subordinate.kind != SignalKind::concentration)
    throw DomainError("difference signal needs two concentration signals");
  if (main.parameter_order != subordinate.parameter_order)
    throw DomainError("difference signal operands have different parameter orders");
  GoalSignal out{SignalKind::difference, main.values, main.parameter_order, {}};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= subordinate.values[i];
  return out;
}

// Turns target concentrations into an integer quantity signal with the given
// total: shares proportional to c_i * rho_i, largest-remainder rounded.
// Negative targets are clamped to zero.
inline GoalSignal concentration_to_quantity(const GoalSignal& target, std::int64_t total) {
  if (target.denominators.size() != target.values.size())
    throw DomainError("concentration target carries no superset denominators");
  if (total <= 0) throw DomainError("quantity total must be positive");
  std::vector<double> mass(target.size());
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    double c = target.values[i];
    if (c < 0.0) {
      c = 0.0;
      ++clamped;
    }
    mass[i] = c * target.denominators[i];
  }
  if (clamped) warn(std::to_string(clamped) + " negative concentration target(s) clamped to 0");
  bool any = false;
  for (double x : mass) any = any || x > 0.0;
  if (!any) throw DomainError("concentration target has no mass to distribute");
  auto shares = largest_remainder(mass, total);
  GoalSignal out{SignalKind::quantity, {}, target.parameter_order, {}};
  out.values.assign(shares.begin(), shares.end());
  return out;
}

}  // namespace grpanon

#endif  // GRPANON_GOAL_SIGNAL_HPP
