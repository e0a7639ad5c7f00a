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

#ifndef GRPANON_VERIFY_HPP
#define GRPANON_VERIFY_HPP

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "grpanon/config.hpp"
#include "grpanon/goal_signal.hpp"
#include "grpanon/microfile.hpp"
#include "grpanon/redistribute.hpp"
#include "grpanon/simplex.hpp"
#include "grpanon/wavelet.hpp"

namespace grpanon {

struct FixtureCheck {
  std::string name;
  double max_delta = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace detail {

struct PrintedRow {
  std::size_t position;
  Relation relation;
  double bound;
  std::vector<double> coefficients;
};

inline std::vector<PrintedRow> printed_system(const YAML::Node& n) {
  std::vector<PrintedRow> rows;
  for (const auto& r : n) {
    const auto rel = r["relation"].as<std::string>();
    rows.push_back({r["position"].as<std::size_t>(),
                    rel == "<=" ? Relation::less_equal : rel == ">=" ? Relation::greater_equal : Relation::equal,
                    r["bound"].as<double>(), r["coefficients"].as<std::vector<double>>()});
  }
  return rows;
}

// The printed system with exact reconstruction coefficients and printed bounds.
inline LinearProgram printed_program(const std::vector<PrintedRow>& rows, const Matrix& r) {
  LinearProgram lp;
  lp.variables = r.cols();
  for (const auto& row : rows) {
    auto coeffs = r.row(row.position - 1);
    lp.constraints.push_back({{coeffs.begin(), coeffs.end()}, row.relation, row.bound,
                              "position " + std::to_string(row.position)});
  }
  return lp;
}

class CheckList {
 public:
  explicit CheckList(double tol) : tol_(tol) {}

  void vector(const std::string& name, std::span<const double> got, std::span<const double> want, double tol) {
    const double d = max_abs_diff(got, want);
    checks_.push_back({name, d, tol, d <= tol, ""});
  }
  void vector(const std::string& name, std::span<const double> got, std::span<const double> want) {
    vector(name, got, want, tol_);
  }

  void add(FixtureCheck c) { checks_.push_back(std::move(c)); }

  // Runs `body`; any exception becomes a failed row named `name`.
  void guarded(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      checks_.push_back({name, std::numeric_limits<double>::infinity(), tol_, false, e.what()});
    }
  }

  void system(const std::string& name, const std::vector<PrintedRow>& rows, const Matrix& r) {
    double d = 0.0;
    for (const auto& row : rows)
      for (std::size_t j = 0; j < row.coefficients.size(); ++j)
        d = std::max(d, std::abs(r(row.position - 1, j) - row.coefficients[j]));
    checks_.push_back({name, d, tol_, d <= tol_, std::to_string(rows.size()) + " rows"});
  }

  void feasible(const std::string& name, const std::vector<PrintedRow>& rows, const Matrix& r,
                std::span<const double> x) {
    const LinearProgram lp = printed_program(rows, r);
    double worst = 0.0;
    std::string where;
    for (const auto& c : lp.constraints) {
      const double v = c.violation(x);
      if (v > worst) {
        worst = v;
        where = c.label + " violated by " + report_number(v);
      }
    }
    for (double v : x) worst = std::max(worst, -v);
    checks_.push_back({name, worst, tol_, worst <= tol_, where});
  }

  std::vector<FixtureCheck> take() { return std::move(checks_); }

 private:
  static std::string report_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  double tol_;
  std::vector<FixtureCheck> checks_;
};

}  // namespace detail

// Recomputes every published worked-example value listed in `fixture_file`
// and compares it with the printed number. `filter` is normally Daubechies-2;
// it is a parameter so the checks can be shown to be sensitive to it.
inline std::vector<FixtureCheck> verify_fixtures(const std::filesystem::path& fixture_file,
                                                 const FilterPair& filter = daubechies2()) {
  if (!std::filesystem::exists(fixture_file))
    return {{"fixture file", std::numeric_limits<double>::infinity(), 0.0, false,
             "fixture missing: " + fixture_file.string()}};
  YAML::Node root;
  try {
    root = YAML::LoadFile(fixture_file.string());
  } catch (const YAML::Exception& e) {
    return {{"fixture file", std::numeric_limits<double>::infinity(), 0.0, false, e.what()}};
  }
  const double tol = root["tolerance"].as<double>(1e-3);
  detail::CheckList checks(tol);
  using Vec = std::vector<double>;

  checks.guarded("quantity fixtures", [&] {
    const YAML::Node q = root["quantity"];
    if (!q) throw Error("fixture missing: quantity section");
    const Vec signal = q["signal"].as<Vec>();
    const WaveletDecomposition dec = decompose(signal, filter, 2);
    checks.vector("quantity a2", dec.approx, q["a2"].as<Vec>());
    checks.vector("quantity d2", dec.detail(2), q["d2"].as<Vec>());
    checks.vector("quantity A2", approximation_component(dec), q["A2"].as<Vec>());
    checks.vector("quantity D1+D2", detail_component(dec), q["D"].as<Vec>());
    const Matrix r = reconstruction_matrix(filter, 2, signal.size());
    const auto rows = detail::printed_system(q["system"]);
    checks.system("quantity constraint coefficients", rows, r);
    checks.feasible("quantity printed solution feasible", rows, r, q["solution"].as<Vec>());
    const Vec a_hat = q["reassembly_solution"].as<Vec>();
    checks.vector("quantity modified A2", r * a_hat, q["A2_modified"].as<Vec>());
    const Vec q_hat = reassemble(dec, a_hat);
    checks.vector("quantity reassembled", q_hat, q["reassembled"].as<Vec>());

    const auto shifted = make_nonnegative(q_hat, q["shift"].as<double>());
    const Vec fixed = mean_fix(shifted.values, signal);
    const auto total = static_cast<std::int64_t>(std::accumulate(signal.begin(), signal.end(), 0.0));
    const auto rounded = round_to_integers(fixed, total);
    const Vec got(rounded.begin(), rounded.end());
    const Vec want = q["final"].as<Vec>();
    checks.vector("quantity final (+-1)", got, want, q["final_tolerance"].as<double>(1.0));
    const auto sum = std::accumulate(rounded.begin(), rounded.end(), std::int64_t{0});
    const double want_sum = std::accumulate(want.begin(), want.end(), 0.0);
    checks.add({"quantity final sum", std::abs(static_cast<double>(sum) - want_sum), 0.0,
                static_cast<double>(sum) == want_sum && sum == total, std::to_string(sum)});
  });

  checks.guarded("concentration fixtures", [&] {
    const YAML::Node c = root["concentration"];
    if (!c) throw Error("fixture missing: concentration section");
    const auto config_path = fixture_file.parent_path() / c["config"].as<std::string>();
    if (!std::filesystem::exists(config_path)) throw Error("fixture missing: " + config_path.string());
    const PipelineConfig cfg = load_config(config_path);
    ScopedWarningSink quiet{nullptr};
    if (!std::filesystem::exists(cfg.input)) throw Error("fixture missing: " + cfg.input.string());
    const Microfile m = load_microfile(cfg.input, cfg.schema);
    const GroupConfig& gc = cfg.group(c["group"].as<std::string>());
    const GoalSignal conc = concentration_signal(m, gc.group);
    checks.vector("concentration signal", conc.values, c["signal"].as<Vec>());
    const WaveletDecomposition dec = decompose(conc.values, filter, 2);
    checks.vector("concentration a2", dec.approx, c["a2"].as<Vec>());
    checks.vector("concentration d2", dec.detail(2), c["d2"].as<Vec>());
    checks.vector("concentration A2", approximation_component(dec), c["A2"].as<Vec>());
    checks.vector("concentration D1+D2", detail_component(dec), c["D"].as<Vec>());
    const Matrix r = reconstruction_matrix(filter, 2, conc.size());
    const auto rows = detail::printed_system(c["system"]);
    checks.system("concentration constraint coefficients", rows, r);
    const Vec a_hat = c["solution"].as<Vec>();
    checks.feasible("concentration printed solution feasible", rows, r, a_hat);
    const Vec c_hat = reassemble(dec, a_hat);
    checks.vector("concentration reassembled", c_hat, c["reassembled"].as<Vec>());
    checks.vector("concentration shifted", make_nonnegative(c_hat, c["shift"].as<double>()).values,
                  c["shifted"].as<Vec>());
  });
  return checks.take();
}

}  // namespace grpanon

#endif  // GRPANON_VERIFY_HPP
