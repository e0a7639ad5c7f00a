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

#ifndef GRPANON_SIMPLEX_HPP
#define GRPANON_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grpanon/error.hpp"

namespace grpanon {

enum class Relation { less_equal, greater_equal, equal };

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "=";
  }
  return "?";
}

struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::less_equal;
  double bound = 0.0;
  std::string label;

  double lhs(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * x[j];
    return s;
  }

  // Amount by which x misses the constraint (0 when satisfied).
  double violation(std::span<const double> x) const {
    const double v = lhs(x);
    switch (relation) {
      case Relation::less_equal: return std::max(0.0, v - bound);
      case Relation::greater_equal: return std::max(0.0, bound - v);
      case Relation::equal: return std::abs(v - bound);
    }
    return 0.0;
  }
};

// Dense linear program. With an empty objective any feasible point is
// acceptable; otherwise `objective . x` is maximized.
struct LinearProgram {
  std::size_t variables = 0;
  std::vector<LinearConstraint> constraints;
  bool nonnegative = true;
  std::vector<double> objective;
};

class InfeasibleProgram : public InfeasibleError {
 public:
  InfeasibleProgram(const std::string& what, std::vector<std::size_t> conflict)
      : InfeasibleError(what), conflict_(std::move(conflict)) {}
  // Indices of an irreducible subset of constraints that cannot hold together.
  const std::vector<std::size_t>& conflict() const { return conflict_; }

 private:
  std::vector<std::size_t> conflict_;
};

inline std::vector<std::size_t> violated_constraints(const LinearProgram& lp, std::span<const double> x,
                                                     double tol) {
  std::vector<std::size_t> out;
  if (x.size() != lp.variables) throw DomainError("point has the wrong number of variables");
  for (std::size_t i = 0; i < lp.constraints.size(); ++i)
    if (lp.constraints[i].violation(x) > tol) out.push_back(i);
  if (lp.nonnegative)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] < -tol) out.push_back(lp.constraints.size() + j);
  return out;
}

// True when x meets every constraint (and sign restriction) within tol.
inline bool satisfies(const LinearProgram& lp, std::span<const double> x, double tol) {
  return violated_constraints(lp, x, tol).empty();
}

namespace detail {

// Two-phase tableau simplex with Bland's rule.
class Tableau {
 public:
  enum class Status { optimal, infeasible, unbounded };

  explicit Tableau(const LinearProgram& lp) : lp_(lp) {
    const std::size_t n = lp.variables;
    structural_ = lp.nonnegative ? n : 2 * n;
    const std::size_t m = lp.constraints.size();
    double scale = 1.0;
    for (const auto& c : lp.constraints) scale = std::max(scale, std::abs(c.bound));
    feas_eps_ = 1e-9 * scale;

    std::size_t slacks = 0;
    std::size_t artificials = 0;
    for (const auto& c : lp.constraints) {
      const bool flip = c.bound < 0.0;
      Relation rel = c.relation;
      if (flip && rel != Relation::equal)
        rel = rel == Relation::less_equal ? Relation::greater_equal : Relation::less_equal;
      if (rel != Relation::equal) ++slacks;
      if (rel != Relation::less_equal) ++artificials;
    }
    first_artificial_ = structural_ + slacks;
    cols_ = first_artificial_ + artificials;
    t_.assign(m, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m, 0);

    std::size_t s = structural_;
    std::size_t a = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = lp.constraints[i];
      if (c.coefficients.size() != n) throw DomainError("constraint '" + c.label + "' has the wrong width");
      const double sign = c.bound < 0.0 ? -1.0 : 1.0;
      Relation rel = c.relation;
      if (sign < 0.0 && rel != Relation::equal)
        rel = rel == Relation::less_equal ? Relation::greater_equal : Relation::less_equal;
      for (std::size_t j = 0; j < n; ++j) {
        t_[i][j] = sign * c.coefficients[j];
        if (!lp.nonnegative) t_[i][n + j] = -sign * c.coefficients[j];
      }
      t_[i][cols_] = sign * c.bound;
      if (rel == Relation::less_equal) {
        t_[i][s] = 1.0;
        basis_[i] = s++;
      } else {
        if (rel == Relation::greater_equal) t_[i][s++] = -1.0;
        t_[i][a] = 1.0;
        basis_[i] = a++;
      }
    }
  }

  Status phase_one() {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = -1.0;
    if (optimize(cost, cols_) == Status::unbounded) return Status::unbounded;  // cannot happen
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (basis_[i] >= first_artificial_) infeasibility += t_[i][cols_];
    if (infeasibility > feas_eps_) return Status::infeasible;
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (basis_[i] < first_artificial_) continue;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(t_[i][j]) > kPivotEps) {
          pivot(i, j, nullptr);
          break;
        }
      }
    }
    return Status::optimal;
  }

  Status phase_two() {
    if (lp_.objective.empty()) return Status::optimal;
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < lp_.variables; ++j) {
      cost[j] = lp_.objective[j];
      if (!lp_.nonnegative) cost[lp_.variables + j] = -lp_.objective[j];
    }
    return optimize(cost, first_artificial_);
  }

  std::vector<double> solution() const {
    std::vector<double> raw(cols_, 0.0);
    for (std::size_t i = 0; i < t_.size(); ++i) raw[basis_[i]] = t_[i][cols_];
    std::vector<double> x(lp_.variables);
    for (std::size_t j = 0; j < lp_.variables; ++j)
      x[j] = lp_.nonnegative ? raw[j] : raw[j] - raw[lp_.variables + j];
    return x;
  }

 private:
  static constexpr double kPivotEps = 1e-11;
  static constexpr double kCostEps = 1e-11;

  // Maximizes cost . z over columns [0, allowed).
  Status optimize(const std::vector<double>& cost, std::size_t allowed) {
    std::vector<double> reduced(cols_ + 1, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) reduced[j] = cost[j];
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) reduced[j] -= cb * t_[i][j];
    }
    const std::size_t limit = 50 * (cols_ + t_.size()) + 1000;
    for (std::size_t iter = 0; iter < limit; ++iter) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (reduced[j] > kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return Status::optimal;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < t_.size(); ++i)
        if (t_[i][enter] > kPivotEps) best = std::min(best, t_[i][cols_] / t_[i][enter]);
      std::size_t leave = t_.size();
      const double slack = 1e-12 * std::max(1.0, std::abs(best));
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i][enter] <= kPivotEps || t_[i][cols_] / t_[i][enter] > best + slack) continue;
        if (leave == t_.size() || basis_[i] < basis_[leave]) leave = i;
      }
      if (leave == t_.size()) return Status::unbounded;
      pivot(leave, enter, &reduced);
    }
    throw Error("simplex iteration limit exceeded");
  }

  void pivot(std::size_t row, std::size_t col, std::vector<double>* reduced) {
    auto& pr = t_[row];
    const double p = pr[col];
    for (double& v : pr) v /= p;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == row) continue;
      const double f = t_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * pr[j];
    }
    if (reduced) {
      const double f = (*reduced)[col];
      for (std::size_t j = 0; j <= cols_; ++j) (*reduced)[j] -= f * pr[j];
    }
    basis_[row] = col;
  }

  const LinearProgram& lp_;
  std::size_t structural_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t cols_ = 0;
  double feas_eps_ = 1e-9;
  std::vector<std::vector<double>> t_;
  std::vector<std::size_t> basis_;
};

inline bool is_feasible(const LinearProgram& lp) {
  Tableau t(lp);
  return t.phase_one() == Tableau::Status::optimal;
}

}  // namespace detail

// Deletion filter: an irreducible infeasible subset of the constraints of an
// infeasible program (sign restrictions are always kept).
inline std::vector<std::size_t> conflicting_subset(const LinearProgram& lp) {
  std::vector<std::size_t> keep(lp.constraints.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  for (std::size_t k = 0; k < keep.size();) {
    LinearProgram trial = lp;
    trial.objective.clear();
    trial.constraints.clear();
    for (std::size_t i = 0; i < keep.size(); ++i)
      if (i != k) trial.constraints.push_back(lp.constraints[keep[i]]);
    if (!detail::is_feasible(trial)) {
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      ++k;
    }
  }
  return keep;
}

namespace detail {

// min sum |x - w| subject to lp, as an LP over (x, u) with u >= |x - w|.
inline LinearProgram nearest_point_program(const LinearProgram& lp, std::span<const double> w) {
  const std::size_t n = lp.variables;
  LinearProgram out;
  out.variables = 2 * n;
  out.nonnegative = lp.nonnegative;
  for (const auto& c : lp.constraints) {
    LinearConstraint e = c;
    e.coefficients.resize(2 * n, 0.0);
    out.constraints.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> up(2 * n, 0.0), down(2 * n, 0.0);
    up[j] = 1.0;
    up[n + j] = -1.0;
    down[j] = -1.0;
    down[n + j] = -1.0;
    out.constraints.push_back({std::move(up), Relation::less_equal, w[j], "distance"});
    out.constraints.push_back({std::move(down), Relation::less_equal, -w[j], "distance"});
    if (!lp.nonnegative) {
      std::vector<double> sign(2 * n, 0.0);
      sign[n + j] = 1.0;
      out.constraints.push_back({std::move(sign), Relation::greater_equal, 0.0, "distance"});
    }
  }
  out.objective.assign(2 * n, 0.0);
  for (std::size_t j = n; j < 2 * n; ++j) out.objective[j] = -1.0;
  return out;
}

}  // namespace detail

// Finds a feasible point (empty objective) or an optimal one. For a pure
// feasibility problem with a `warm_start`, the feasible point nearest to it
// in L1 is returned (the warm start itself when it is feasible).
inline std::vector<double> solve(const LinearProgram& lp, std::optional<std::span<const double>> warm_start = {}) {
  if (!lp.objective.empty() && lp.objective.size() != lp.variables)
    throw DomainError("objective has the wrong number of variables");
  const bool anchored = lp.objective.empty() && warm_start && warm_start->size() == lp.variables;
  if (anchored) {
    double scale = 1.0;
    for (const auto& c : lp.constraints) scale = std::max(scale, std::abs(c.bound));
    if (satisfies(lp, *warm_start, 1e-12 * scale)) return {warm_start->begin(), warm_start->end()};
  }
  const LinearProgram program = anchored ? detail::nearest_point_program(lp, *warm_start) : lp;
  detail::Tableau t(program);
  if (t.phase_one() != detail::Tableau::Status::optimal) {
    auto conflict = conflicting_subset(lp);
    std::string names;
    for (std::size_t i : conflict) {
      const auto& c = lp.constraints[i];
      names += (names.empty() ? "" : ", ") + (c.label.empty() ? "#" + std::to_string(i) : c.label);
    }
    throw InfeasibleProgram("constraint system is infeasible; conflicting rows: " + names, std::move(conflict));
  }
  if (t.phase_two() == detail::Tableau::Status::unbounded) throw UnboundedError("objective is unbounded");
  std::vector<double> x = t.solution();
  x.resize(lp.variables);
  return x;
}

}  // namespace grpanon

#endif  // GRPANON_SIMPLEX_HPP
