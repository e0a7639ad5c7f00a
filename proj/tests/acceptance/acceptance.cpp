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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--criterion N]...

#include <sys/wait.h>
#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "grpanon/config.hpp"
#include "grpanon/pipeline.hpp"
#include "grpanon/redistribute.hpp"
#include "grpanon/remap.hpp"
#include "grpanon/verify.hpp"
#include "grpanon/wavelet.hpp"

namespace {

using namespace grpanon;
using Vec = std::vector<double>;
using Clock = std::chrono::steady_clock;

const std::filesystem::path kSource = GRPANON_SOURCE_DIR;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  // Records one check; failed checks are listed first in the detail line.
  void check(bool ok, const std::string& what) {
    passed = passed && ok;
    notes.push_back((ok ? "" : "FAILED ") + what);
  }
  void near(const std::string& what, const Vec& got, const Vec& want, double tol) {
    const double d = max_abs_diff(got, want);
    check(d <= tol, what + " max|d|=" + fmt(d) + " (tol " + fmt(tol) + ")");
  }
};

struct Fixtures {
  YAML::Node root = YAML::LoadFile((kSource / "data" / "published_fixtures.yaml").string());
  PipelineConfig quantity = load_config(kSource / "samples" / "military_quantity.yaml");
  PipelineConfig concentration = load_config(kSource / "samples" / "military_concentration.yaml");

  Vec vec(const std::string& section, const std::string& key) const { return root[section][key].as<Vec>(); }

  const Microfile& microfile() {
    if (!file_) {
      ScopedWarningSink quiet{nullptr};
      file_ = load_microfile(quantity.input, quantity.schema);
    }
    return *file_;
  }

 private:
  std::optional<Microfile> file_;
};

Fixtures& fixtures() {
  static Fixtures f;
  return f;
}

Outcome criterion_1() {
  Outcome o;
  const Vec q = fixtures().vec("quantity", "signal");
  const auto start = Clock::now();
  const auto dec = decompose(q, daubechies2(), 2);
  const double ms = elapsed_ms(start);
  o.near("a2", dec.approx, fixtures().vec("quantity", "a2"), 1e-3);
  o.near("d2", dec.detail(2), fixtures().vec("quantity", "d2"), 1e-3);
  o.check(ms < 1.0, "runtime " + fmt(ms) + " ms (< 1 ms)");
  return o;
}

Vec concentration_values() {
  const auto& gc = fixtures().concentration.groups.front();
  return concentration_signal(fixtures().microfile(), gc.group).values;
}

Outcome criterion_2() {
  Outcome o;
  const auto qdec = decompose(fixtures().vec("quantity", "signal"), daubechies2(), 2);
  o.near("quantity A2", approximation_component(qdec), fixtures().vec("quantity", "A2"), 1e-3);
  o.near("quantity D1+D2", detail_component(qdec), fixtures().vec("quantity", "D"), 1e-3);

  const auto cdec = decompose(concentration_values(), daubechies2(), 2);
  o.near("concentration a2", cdec.approx, fixtures().vec("concentration", "a2"), 1e-3);
  o.near("concentration d2", cdec.detail(2), fixtures().vec("concentration", "d2"), 1e-3);
  o.near("concentration A2", approximation_component(cdec), fixtures().vec("concentration", "A2"), 1e-3);
  o.near("concentration D1+D2", detail_component(cdec), fixtures().vec("concentration", "D"), 1e-3);
  const Vec c_hat = reassemble(cdec, fixtures().vec("concentration", "solution"));
  o.near("concentration reassembled", c_hat, fixtures().vec("concentration", "reassembled"), 1e-3);
  o.near("concentration shifted", make_nonnegative(c_hat, 0.5).values, fixtures().vec("concentration", "shifted"),
         1e-3);
  return o;
}

void check_system(Outcome& o, const std::string& section, const Vec& signal) {
  const Matrix r = reconstruction_matrix(daubechies2(), 2, signal.size());
  LinearProgram lp;
  lp.variables = r.cols();
  double coeff_delta = 0.0;
  std::size_t rows = 0;
  for (const auto& row : fixtures().root[section]["system"]) {
    const auto pos = row["position"].as<std::size_t>();
    const Vec printed = row["coefficients"].as<Vec>();
    for (std::size_t j = 0; j < printed.size(); ++j) coeff_delta = std::max(coeff_delta, std::abs(r(pos - 1, j) - printed[j]));
    const auto rel = row["relation"].as<std::string>();
    auto coeffs = r.row(pos - 1);
    lp.constraints.push_back({{coeffs.begin(), coeffs.end()},
                              rel == "<=" ? Relation::less_equal : Relation::greater_equal,
                              row["bound"].as<double>(),
                              "position " + std::to_string(pos)});
    ++rows;
  }
  o.check(coeff_delta <= 1e-3, section + " " + std::to_string(rows) + " rows coefficients max|d|=" + fmt(coeff_delta));
  const Vec solution = fixtures().vec(section, "solution");
  const auto violated = violated_constraints(lp, solution, 1e-3);
  std::string which;
  for (std::size_t i : violated) {
    which += " " + (i < lp.constraints.size() ? lp.constraints[i].label : "sign") + " by " +
             fmt(i < lp.constraints.size() ? lp.constraints[i].violation(solution) : -solution[i - lp.constraints.size()]);
  }
  o.check(violated.empty(), section + " printed solution satisfies system" + (which.empty() ? "" : ":" + which));
}

Outcome criterion_3() {
  Outcome o;
  check_system(o, "quantity", fixtures().vec("quantity", "signal"));
  check_system(o, "concentration", concentration_values());
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const auto& gc = fixtures().quantity.groups.front();
  o.check(gc.shift && *gc.shift == 2150.0, "configured shift 2150");
  const GoalSignal q = group_signal(fixtures().microfile(), gc);
  const auto dec = group_decomposition(q, gc);
  const auto r = group_redistribution(q, dec, gc);
  const auto target = quantity_target(gc, q, q, std::nullopt, r);
  const Vec want = fixtures().vec("quantity", "final");
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(static_cast<double>(target[i]) - want[i]));
  o.check(worst <= 1.0, "q_fin max|d|=" + fmt(worst) + " (tol 1)");
  const auto sum = std::accumulate(target.begin(), target.end(), std::int64_t{0});
  o.check(sum == 6272, "sum " + std::to_string(sum) + " (= 6272)");
  return o;
}

std::map<std::string, std::size_t> multiset(const Microfile& m, std::size_t col) {
  std::map<std::string, std::size_t> out;
  for (const auto& v : m.column(col)) ++out[v];
  return out;
}

Outcome criterion_5() {
  Outcome o;
  const auto& cfg = fixtures().quantity;
  const auto& g = cfg.groups.front().group;
  const Microfile& m = fixtures().microfile();
  const Vec want = fixtures().vec("quantity", "final");
  const std::vector<std::int64_t> target(want.begin(), want.end());
  const auto start = Clock::now();
  const auto w = weights_from_schema(m, g.parameter, cfg.category_match, cfg.category_mismatch);
  const auto plan = plan_swaps(m, g, target, w, {cfg.groups.front().candidate_cap, cfg.seed});
  const Microfile out = apply_swaps(m, plan);
  const double ms = elapsed_ms(start);
  o.check(quantity_signal(out, g).values == want, "recomputed quantity equals target exactly");
  bool identical = true;
  bool same_multiset = true;
  const std::size_t pcol = m.column_index(g.parameter);
  for (std::size_t c = 0; c < m.width(); ++c) {
    if (c == pcol) {
      same_multiset = multiset(out, c) == multiset(m, c);
    } else {
      identical = identical && out.column(c) == m.column(c);
    }
  }
  o.check(identical, "non-parameter columns bit-identical");
  o.check(same_multiset, "parameter-value multiset unchanged");
  o.check(superset_counts(out, g) == superset_counts(m, g), "superset counts per position unchanged");
  o.check(ms < 10000.0, std::to_string(m.size()) + " records, " + std::to_string(plan.swaps.size()) + " swaps in " +
                            fmt(ms) + " ms (< 10 s)");
  return o;
}

Outcome criterion_6() {
  Outcome o;
  constexpr int kTrials = 100;
  const std::size_t lengths[] = {8, 16, 32, 64};
  const FilterPair filters[] = {haar(), daubechies2(), daubechies4()};
  std::mt19937_64 rng(20100616);
  auto uniform = [&](std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (auto& x : v) x = u(rng);
    return v;
  };
  auto energy = [](const Vec& x) { return std::inner_product(x.begin(), x.end(), x.begin(), 0.0); };
  double pr = 0.0, en = 0.0, moments = 0.0, sums = 0.0, details = 0.0, round_dev = 0.0;
  bool totals = true;
  int trials = 0;
  for (std::size_t n : lengths) {
    for (int t = 0; t < kTrials; ++t, ++trials) {
      const FilterPair& f = filters[static_cast<std::size_t>(t) % 3];
      const Vec x = uniform(n, -1.0, 1.0);
      const int level = std::min(2, max_level(n));
      const auto dec = decompose(x, f, level);
      pr = std::max(pr, max_abs_diff(reconstruct(dec), x));
      const auto one = decompose(x, f, 1);
      en = std::max(en, std::abs(energy(one.approx) + energy(one.detail(1)) - energy(x)));

      const Vec ref = uniform(n, 0.0, 10.0);
      const Vec y = uniform(n, 0.1, 50.0);
      const auto a = mean_std(normalize_mean_std(y, ref));
      const auto b = mean_std(ref);
      moments = std::max({moments, std::abs(a.mean - b.mean), std::abs(a.stddev - b.stddev)});
      const Vec fixed = mean_fix(y, ref);
      sums = std::max(sums, std::abs(std::accumulate(fixed.begin(), fixed.end(), 0.0) -
                                     std::accumulate(ref.begin(), ref.end(), 0.0)));

      const auto again = decompose(reassemble(dec, uniform(dec.approx.size(), -5.0, 5.0)), f, level);
      for (int j = 1; j <= level; ++j) details = std::max(details, max_abs_diff(again.detail(j), dec.detail(j)));

      const auto total = static_cast<std::int64_t>(1 + rng() % 10000);
      Vec share = uniform(n, 0.0, 1.0);
      const double s = std::accumulate(share.begin(), share.end(), 0.0);
      for (auto& v : share) v *= static_cast<double>(total) / s;
      const auto rounded = round_to_integers(share, total);
      totals = totals && std::accumulate(rounded.begin(), rounded.end(), std::int64_t{0}) == total;
      for (std::size_t i = 0; i < n; ++i) round_dev = std::max(round_dev, std::abs(static_cast<double>(rounded[i]) - share[i]));
    }
  }
  o.check(pr <= 1e-9, "reconstruction " + fmt(pr));
  o.check(en <= 1e-9, "energy " + fmt(en));
  o.check(moments <= 1e-9, "mean/std " + fmt(moments));
  o.check(sums <= 1e-9, "sum " + fmt(sums));
  o.check(details <= 1e-6, "details " + fmt(details));
  o.check(totals && round_dev < 1.0, "rounding totals exact, max dev " + fmt(round_dev));

  // Influential metric over random record pairs, chi_1 = 0.
  std::vector<std::vector<std::string>> cols(3);
  std::uniform_int_distribution<int> age(0, 90), cat(0, 4);
  for (int r = 0; r < 200; ++r) {
    cols[0].push_back(std::to_string(r % 4));
    cols[1].push_back(std::to_string(age(rng)));
    cols[2].push_back(std::to_string(cat(rng)));
  }
  const Microfile m({{"p", AttributeKind::nominal, AttributeRole::parameter, 0.0},
                     {"a", AttributeKind::ordinal, AttributeRole::influential, 1.3},
                     {"c", AttributeKind::nominal, AttributeRole::influential, 0.6}},
                    cols);
  const auto w = weights_from_schema(m, "p", 0.0, 1.0);
  bool symmetric = true, zero = true;
  for (int t = 0; t < 4 * kTrials; ++t) {
    const std::size_t i = rng() % m.size(), j = rng() % m.size();
    symmetric = symmetric && influential_metric(m, i, j, w) == influential_metric(m, j, i, w);
    zero = zero && influential_metric(m, i, i, w) == 0.0;
  }
  o.check(symmetric && zero, "metric symmetric and zero on identical records");
  o.notes.insert(o.notes.begin(), std::to_string(trials) + " trials");
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const auto start = Clock::now();
  const std::string cmd = std::string("\"") + GRPANON_CLI_PATH + "\" verify > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double ms = elapsed_ms(start);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.check(code == 0, "grpanon verify exit code " + std::to_string(code));
  o.check(ms < 5000.0, "runtime " + fmt(ms) + " ms (< 5 s)");
  return o;
}

struct Criterion {
  int number;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "decomposition fixtures", criterion_1},
      {2, "reconstruction fixtures", criterion_2},
      {3, "constraint-system fixtures", criterion_3},
      {4, "end-to-end quantity fixture", criterion_4},
      {5, "remap realization", criterion_5},
      {6, "property suites", criterion_6},
      {7, "verify command", criterion_7},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("criterion %d %-30s %s  %s\n", c.number, c.title, o.passed ? "PASS" : "FAIL", detail.c_str());
    ok = ok && o.passed;
  }
  return ok ? 0 : 1;
}
