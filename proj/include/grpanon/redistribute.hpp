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

#ifndef GRPANON_REDISTRIBUTE_HPP
#define GRPANON_REDISTRIBUTE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grpanon/apportion.hpp"
#include "grpanon/error.hpp"
#include "grpanon/simplex.hpp"
#include "grpanon/wavelet.hpp"

namespace grpanon {

// One bound on the rebuilt approximation at a 1-based signal position. Without
// an explicit bound the original approximation value A_k[position] is used.
struct ConstraintRow {
  std::size_t position = 1;
  Relation relation = Relation::less_equal;
  std::optional<double> bound;
};

enum class ObjectiveKind { feasibility, maximize, minimize };

struct ConstraintSpec {
  std::vector<ConstraintRow> rows;
  ObjectiveKind objective = ObjectiveKind::feasibility;
  // 1-based positions whose approximation sum is maximized or minimized.
  std::vector<std::size_t> objective_positions;
  bool nonnegative = true;
};

enum class Repair { none, mean_fix, normalize_mean_std };

inline std::string_view to_string(Repair r) {
  switch (r) {
    case Repair::none: return "none";
    case Repair::mean_fix: return "mean_fix";
    case Repair::normalize_mean_std: return "normalize_mean_std";
  }
  return "?";
}

// Turns each spec row (i, rel, b) into  sum_j R[i][j] * a_j  rel  b  over the
// new approximation coefficients a.
inline LinearProgram build_constraints(const WaveletDecomposition& dec, const ConstraintSpec& spec) {
  if (spec.rows.empty()) throw DomainError("constraint spec has no rows");
  const std::size_t m = dec.signal_length;
  const Matrix r = reconstruction_matrix(dec.filter, dec.level, m);
  const std::vector<double> original = approximation_component(dec);
  LinearProgram lp;
  lp.variables = r.cols();
  lp.nonnegative = spec.nonnegative;
  for (std::size_t k = 0; k < spec.rows.size(); ++k) {
    const auto& row = spec.rows[k];
    if (row.position < 1 || row.position > m)
      throw DomainError("constraint row " + std::to_string(k + 1) + ": position " + std::to_string(row.position) +
                        " outside 1.." + std::to_string(m));
    const auto coeffs = r.row(row.position - 1);
    const double bound = row.bound.value_or(original[row.position - 1]);
    lp.constraints.push_back(LinearConstraint{{coeffs.begin(), coeffs.end()},
                                              row.relation,
                                              bound,
                                              "position " + std::to_string(row.position) + " " +
                                                  std::string(to_string(row.relation)) + " " + std::to_string(bound)});
  }
  if (spec.objective != ObjectiveKind::feasibility) {
    if (spec.objective_positions.empty()) throw DomainError("optimizing objective needs at least one position");
    const double sign = spec.objective == ObjectiveKind::maximize ? 1.0 : -1.0;
    lp.objective.assign(lp.variables, 0.0);
    for (std::size_t p : spec.objective_positions) {
      if (p < 1 || p > m) throw DomainError("objective position " + std::to_string(p) + " out of range");
      for (std::size_t j = 0; j < lp.variables; ++j) lp.objective[j] += sign * r(p - 1, j);
    }
  }
  return lp;
}

inline std::vector<double> solve_constraints(const LinearProgram& lp,
                                             std::optional<std::span<const double>> warm_start = {}) {
  return solve(lp, warm_start);
}

// theta-hat = R * a + (D_1 + ... + D_k): new approximation, original details.
inline std::vector<double> reassemble(const WaveletDecomposition& dec, std::span<const double> approx) {
  if (approx.size() != dec.approx.size())
    throw DomainError("expected " + std::to_string(dec.approx.size()) + " approximation coefficients, got " +
                      std::to_string(approx.size()));
  WaveletDecomposition modified = dec;
  modified.approx.assign(approx.begin(), approx.end());
  return reconstruct(modified);
}

struct ShiftedSignal {
  std::vector<double> values;
  double shift = 0.0;
};

// Adds `shift` to every element. Without an explicit shift the smallest one
// making the signal non-negative is used: ceil(-min) + margin, or 0 when the
// signal is already non-negative.
inline ShiftedSignal make_nonnegative(std::span<const double> signal, std::optional<double> shift = {},
                                      double margin = 0.0) {
  double s = 0.0;
  if (shift) {
    s = *shift;
  } else if (!signal.empty()) {
    const auto [lo, hi] = std::minmax_element(signal.begin(), signal.end());
    // Round-off residue around zero does not count as negative.
    const double tol = 1e-9 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
    if (*lo < -tol) s = std::ceil(-*lo) + margin;
  }
  ShiftedSignal out{{signal.begin(), signal.end()}, s};
  for (double& v : out.values) v += s;
  return out;
}

// Rescales the signal so its sum equals the reference sum.
inline std::vector<double> mean_fix(std::span<const double> signal, std::span<const double> reference) {
  const double sum = std::accumulate(signal.begin(), signal.end(), 0.0);
  if (sum == 0.0) throw DomainError("mean_fix: signal sums to zero");
  const double target = std::accumulate(reference.begin(), reference.end(), 0.0);
  std::vector<double> out(signal.begin(), signal.end());
  const double factor = target / sum;
  for (double& v : out) v *= factor;
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

// Mean and sample standard deviation (denominator m - 1).
inline MeanStd mean_std(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("mean/std need at least two samples");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(x.size() - 1))};
}

// Affine map giving the signal the reference's mean and sample standard
// deviation: z = (x - mean_x) * (std_ref / std_x) + mean_ref.
inline std::vector<double> normalize_mean_std(std::span<const double> signal, std::span<const double> reference) {
  const MeanStd in = mean_std(signal);
  const MeanStd ref = mean_std(reference);
  if (!(in.stddev > 0.0)) throw DomainError("normalize_mean_std: signal has zero standard deviation");
  if (!(ref.stddev > 0.0)) throw DomainError("normalize_mean_std: reference has zero standard deviation");
  std::vector<double> out(signal.begin(), signal.end());
  const double ratio = ref.stddev / in.stddev;
  for (double& v : out) v = (v - in.mean) * ratio + ref.mean;
  return out;
}

// Largest-remainder rounding of a non-negative signal to integers summing to total.
inline std::vector<std::int64_t> round_to_integers(std::span<const double> signal, std::int64_t total) {
  if (total < 0) throw DomainError("round_to_integers: total must be non-negative");
  double scale = 1.0;
  for (double v : signal) scale = std::max(scale, std::abs(v));
  std::vector<double> clean(signal.begin(), signal.end());
  for (double& v : clean) {
    if (v < -1e-9 * scale) throw DomainError("round_to_integers: signal has negative elements");
    v = std::max(v, 0.0);
  }
  return largest_remainder(clean, total);
}

struct RedistributionOptions {
  ConstraintSpec constraints;
  // Feasibility solves return the feasible point nearest to this one (itself
  // when feasible); defaults to the original approximation coefficients.
  std::optional<std::vector<double>> warm_start;
  std::optional<double> shift;
  double margin = 0.0;
  Repair repair = Repair::mean_fix;
};

struct RedistributionResult {
  std::vector<double> approx;
  std::vector<double> reassembled;
  std::vector<double> final_signal;
  double shift = 0.0;
  Repair repair = Repair::none;
};

// Full modifying step: solve for new approximation coefficients, rebuild with
// the original details, shift to non-negative, then apply the chosen repair
// against the original signal.
inline RedistributionResult redistribute(std::span<const double> signal, const WaveletDecomposition& dec,
                                         const RedistributionOptions& opt) {
  if (signal.size() != dec.signal_length) throw DomainError("signal does not match its decomposition");
  const LinearProgram lp = build_constraints(dec, opt.constraints);
  const std::vector<double>& start = opt.warm_start ? *opt.warm_start : dec.approx;
  RedistributionResult res;
  res.approx = solve_constraints(lp, std::span<const double>(start));
  res.reassembled = reassemble(dec, res.approx);
  ShiftedSignal shifted = make_nonnegative(res.reassembled, opt.shift, opt.margin);
  res.shift = shifted.shift;
  res.repair = opt.repair;
  switch (opt.repair) {
    case Repair::none: res.final_signal = std::move(shifted.values); break;
    case Repair::mean_fix: res.final_signal = mean_fix(shifted.values, signal); break;
    case Repair::normalize_mean_std: res.final_signal = normalize_mean_std(shifted.values, signal); break;
  }
  return res;
}

}  // namespace grpanon

#endif  // GRPANON_REDISTRIBUTE_HPP
