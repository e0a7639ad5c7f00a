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

#ifndef GRPANON_REMAP_HPP
#define GRPANON_REMAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "grpanon/error.hpp"
#include "grpanon/goal_signal.hpp"
#include "grpanon/microfile.hpp"

namespace grpanon {

struct WeightedAttribute {
  std::size_t column = 0;
  double weight = 0.0;
};

// Weights of the influential metric: zeta per ordinal attribute, gamma per
// nominal attribute, and the category-match values chi_1 <= chi_2.
struct InfluentialWeights {
  std::vector<WeightedAttribute> ordinal;
  std::vector<WeightedAttribute> nominal;
  double category_match = 0.0;
  double category_mismatch = 1.0;

  void validate() const {
    if (category_match > category_mismatch)
      throw DomainError("category match value must not exceed the mismatch value");
    bool any = false;
    for (const auto* list : {&ordinal, &nominal}) {
      for (const auto& a : *list) {
        if (a.weight < 0.0) throw DomainError("influential weights must be non-negative");
        any = any || a.weight > 0.0;
      }
    }
    if (!any) throw DomainError("at least one influential weight must be positive");
  }
};

// Collects the influential (and vital) attributes of `m` with their declared
// weights. The parameter attribute `exclude` never takes part.
inline InfluentialWeights weights_from_schema(const Microfile& m, std::string_view exclude, double match = 0.0,
                                              double mismatch = 1.0) {
  InfluentialWeights w;
  w.category_match = match;
  w.category_mismatch = mismatch;
  for (std::size_t c = 0; c < m.width(); ++c) {
    const Attribute& a = m.attribute(c);
    if (!a.influential() || a.name == exclude) continue;
    (a.kind == AttributeKind::ordinal ? w.ordinal : w.nominal).push_back({c, a.weight});
  }
  return w;
}

namespace detail {

inline double ordinal_term(double a, double b) {
  if (a < 0.0 || b < 0.0) throw DomainError("influential metric is undefined for negative ordinal values");
  const double s = a + b;
  if (s == 0.0) return 0.0;
  const double r = (a - b) / s;
  return r * r;
}

}  // namespace detail

// Weighted squared distance between two records over the influential attributes.
inline double influential_metric(const Microfile& m, std::size_t r1, std::size_t r2, const InfluentialWeights& w) {
  double total = 0.0;
  for (const auto& a : w.ordinal) total += a.weight * detail::ordinal_term(m.number(r1, a.column), m.number(r2, a.column));
  for (const auto& a : w.nominal) {
    const double chi = m.text(r1, a.column) == m.text(r2, a.column) ? w.category_match : w.category_mismatch;
    total += a.weight * chi * chi;
  }
  return total;
}

struct Swap {
  std::size_t member = 0;
  std::size_t partner = 0;
  double cost = 0.0;
  bool operator==(const Swap&) const = default;
};

struct SwapPlan {
  std::string parameter;
  std::vector<Swap> swaps;
  double total_cost = 0.0;
};

struct RemapOptions {
  std::size_t candidate_cap = 10000;
  std::uint64_t seed = 0;
};

namespace detail {

// Influential attributes packed per record: ordinal values and interned
// nominal category codes, so candidate evaluation avoids string compares.
class PackedRecords {
 public:
  PackedRecords(const Microfile& m, const InfluentialWeights& w) : w_(w) {
    no_ = w.ordinal.size();
    nn_ = w.nominal.size();
    ord_.resize(m.size() * no_);
    nom_.resize(m.size() * nn_);
    for (std::size_t k = 0; k < no_; ++k) {
      for (std::size_t r = 0; r < m.size(); ++r) {
        const double v = m.number(r, w.ordinal[k].column);
        if (v < 0.0) throw DomainError("ordinal influential attribute '" + m.attribute(w.ordinal[k].column).name +
                                       "' has negative value at row " + std::to_string(r + 1));
        ord_[r * no_ + k] = v;
      }
    }
    for (std::size_t k = 0; k < nn_; ++k) {
      std::unordered_map<std::string, std::uint32_t> codes;
      for (std::size_t r = 0; r < m.size(); ++r) {
        auto [it, _] = codes.emplace(m.text(r, w.nominal[k].column), static_cast<std::uint32_t>(codes.size()));
        nom_[r * nn_ + k] = it->second;
      }
    }
    match_sq_ = w.category_match * w.category_match;
    mismatch_sq_ = w.category_mismatch * w.category_mismatch;
  }

  double cost(std::size_t a, std::size_t b) const {
    double total = 0.0;
    for (std::size_t k = 0; k < no_; ++k) total += w_.ordinal[k].weight * ordinal_term(ord_[a * no_ + k], ord_[b * no_ + k]);
    for (std::size_t k = 0; k < nn_; ++k)
      total += w_.nominal[k].weight * (nom_[a * nn_ + k] == nom_[b * nn_ + k] ? match_sq_ : mismatch_sq_);
    return total;
  }

 private:
  const InfluentialWeights& w_;
  std::size_t no_ = 0;
  std::size_t nn_ = 0;
  std::vector<double> ord_;
  std::vector<std::uint32_t> nom_;
  double match_sq_ = 0.0;
  double mismatch_sq_ = 1.0;
};

__extension__ typedef unsigned __int128 u128;

// Uniform integer in [0, n) from a 64-bit draw (multiply-shift).
inline std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<u128>(rng()) * n) >> 64);
}

inline std::size_t argmax_gap(const std::vector<std::int64_t>& gap) {
  std::size_t best = gap.size();
  for (std::size_t i = 0; i < gap.size(); ++i)
    if (gap[i] > 0 && (best == gap.size() || gap[i] > gap[best])) best = i;
  return best;
}

}  // namespace detail

// Greedy swap planner. Each step takes the position with the largest surplus
// (donor) and the one with the largest deficit (recipient), then moves one
// group member from donor to recipient by exchanging parameter values with a
// non-member of the superset population at the recipient. Among at most
// `candidate_cap` (member, partner) pairs the cheapest by influential metric
// wins, ties going to the lower index pair. Records are used at most once.
inline SwapPlan plan_swaps(const Microfile& m, const GroupSpec& g, std::span<const std::int64_t> target,
                           const InfluentialWeights& w, const RemapOptions& opt = {}) {
  w.validate();
  if (opt.candidate_cap == 0) throw DomainError("candidate cap must be positive");
  if (target.size() != g.length()) throw DomainError("target length does not match the group's parameter order");
  const GoalSignal current = quantity_signal(m, g);
  std::int64_t have = 0;
  std::int64_t want = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] < 0) throw DomainError("target quantity at position " + std::to_string(i + 1) + " is negative");
    have += static_cast<std::int64_t>(current.values[i]);
    want += target[i];
  }
  if (have != want)
    throw DomainError("target total " + std::to_string(want) + " differs from current group size " +
                      std::to_string(have) + "; remapping only moves members");

  const ParameterIndex index(m, g);
  std::vector<std::vector<std::size_t>> members_at(g.length());
  std::vector<std::vector<std::size_t>> partners_at(g.length());
  const std::vector<std::size_t> mem = members(m, g);
  for (std::size_t r : mem) members_at[*index(r)].push_back(r);
  {
    std::vector<char> is_member(m.size(), 0);
    for (std::size_t r : mem) is_member[r] = 1;
    for (std::size_t r : superset_members(m, g))
      if (!is_member[r])
        if (auto p = index(r)) partners_at[*p].push_back(r);
  }

  std::vector<std::int64_t> surplus(g.length());
  std::vector<std::int64_t> deficit(g.length());
  for (std::size_t i = 0; i < g.length(); ++i) {
    const auto diff = static_cast<std::int64_t>(current.values[i]) - target[i];
    surplus[i] = std::max<std::int64_t>(diff, 0);
    deficit[i] = std::max<std::int64_t>(-diff, 0);
    if (deficit[i] > static_cast<std::int64_t>(partners_at[i].size()))
      throw InfeasibleError("position " + std::to_string(i + 1) + " ('" + g.parameter_order[i] + "') needs " +
                            std::to_string(deficit[i]) + " partners but only " +
                            std::to_string(partners_at[i].size()) + " non-member superset records are available");
  }

  const detail::PackedRecords packed(m, w);
  std::mt19937_64 rng(opt.seed);
  SwapPlan plan;
  plan.parameter = g.parameter;
  for (;;) {
    const std::size_t donor = detail::argmax_gap(surplus);
    if (donor == surplus.size()) break;
    const std::size_t recipient = detail::argmax_gap(deficit);
    auto& pool_a = members_at[donor];
    auto& pool_b = partners_at[recipient];

    std::size_t best_a = 0;
    std::size_t best_b = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    auto consider = [&](std::size_t ia, std::size_t ib) {
      const double c = packed.cost(pool_a[ia], pool_b[ib]);
      if (c < best_cost || (c == best_cost && std::pair(pool_a[ia], pool_b[ib]) < std::pair(pool_a[best_a], pool_b[best_b]))) {
        best_cost = c;
        best_a = ia;
        best_b = ib;
      }
    };
    const auto na = pool_a.size();
    const auto nb = pool_b.size();
    if (na <= opt.candidate_cap / nb) {
      for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib) consider(ia, ib);
    } else {
      for (std::size_t k = 0; k < opt.candidate_cap; ++k) {
        const std::size_t ia = detail::bounded(rng, na);
        const std::size_t ib = detail::bounded(rng, nb);
        consider(ia, ib);
      }
    }

    plan.swaps.push_back({pool_a[best_a], pool_b[best_b], best_cost});
    plan.total_cost += best_cost;
    pool_a[best_a] = pool_a.back();
    pool_a.pop_back();
    pool_b[best_b] = pool_b.back();
    pool_b.pop_back();
    --surplus[donor];
    --deficit[recipient];
  }
  return plan;
}

// Exchanges only the parameter values of each planned pair.
inline Microfile apply_swaps(const Microfile& m, const SwapPlan& plan) {
  if (plan.swaps.empty()) return m;
  const std::size_t col = m.column_index(plan.parameter);
  std::unordered_set<std::size_t> used;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(plan.swaps.size());
  for (const auto& s : plan.swaps) {
    if (s.member >= m.size() || s.partner >= m.size()) throw DomainError("swap refers to a record outside the file");
    if (!used.insert(s.member).second || !used.insert(s.partner).second)
      throw DomainError("record used in more than one swap (" + std::to_string(s.member) + ", " +
                        std::to_string(s.partner) + ")");
    pairs.emplace_back(s.member, s.partner);
  }
  return m.with_swapped_cells(col, pairs);
}

}  // namespace grpanon

#endif  // GRPANON_REMAP_HPP
