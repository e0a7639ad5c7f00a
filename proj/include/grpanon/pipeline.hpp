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

#ifndef GRPANON_PIPELINE_HPP
#define GRPANON_PIPELINE_HPP

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "grpanon/config.hpp"
#include "grpanon/error.hpp"
#include "grpanon/goal_signal.hpp"
#include "grpanon/microfile.hpp"
#include "grpanon/redistribute.hpp"
#include "grpanon/remap.hpp"
#include "grpanon/report.hpp"
#include "grpanon/wavelet.hpp"

namespace grpanon {

// A failure inside one pipeline stage; the message is prefixed with the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

// Runs `f` as stage `name`, recording its wall time and tagging library errors.
template <typename F>
auto run_stage(const std::string& name, std::vector<StageTiming>& timings, F&& f) -> decltype(f()) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - start;
    timings.push_back({name, dt.count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record();
    } else {
      auto result = f();
      record();
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

struct GroupOutcome {
  std::string id;
  SignalKind kind = SignalKind::quantity;
  std::uint64_t seed = 0;
  GoalSignal signal;
  std::optional<GoalSignal> subordinate;
  GoalSignal quantity_before;
  std::optional<WaveletDecomposition> decomposition;
  std::optional<RedistributionResult> redistribution;
  std::vector<std::int64_t> target;
  SwapPlan plan;
  GoalSignal quantity_after;
  std::vector<StageTiming> timings;
};

struct RunResult {
  Microfile output;
  std::vector<GroupOutcome> groups;
  std::uint64_t seed = 0;
};

// The goal signal a group is configured for (for difference signals the
// subordinate concentration is returned through `subordinate`).
inline GoalSignal group_signal(const Microfile& m, const GroupConfig& gc, std::optional<GoalSignal>* subordinate = nullptr) {
  validate_group(m, gc.group);
  switch (gc.signal) {
    case SignalKind::quantity: return quantity_signal(m, gc.group);
    case SignalKind::concentration: return concentration_signal(m, gc.group);
    case SignalKind::difference: {
      validate_group(m, *gc.subordinate);
      GoalSignal main = concentration_signal(m, gc.group);
      GoalSignal sub = concentration_signal(m, *gc.subordinate);
      GoalSignal diff = difference_signal(main, sub);
      diff.denominators = main.denominators;
      if (subordinate) *subordinate = std::move(sub);
      return diff;
    }
  }
  throw DomainError("unknown signal kind");
}

inline WaveletDecomposition group_decomposition(const GoalSignal& s, const GroupConfig& gc) {
  return decompose(s.values, filter_by_name(gc.wavelet), gc.level);
}

inline RedistributionResult group_redistribution(const GoalSignal& s, const WaveletDecomposition& dec,
                                                 const GroupConfig& gc) {
  if (!gc.constraints) throw DomainError("group '" + gc.group.id + "' has no constraints");
  RedistributionOptions opt;
  opt.constraints = *gc.constraints;
  opt.warm_start = gc.warm_start;
  opt.shift = gc.shift;
  opt.margin = gc.margin;
  opt.repair = gc.repair;
  return redistribute(s.values, dec, opt);
}

// Integer quantity target realizing a redistributed signal with the group's
// original member count.
inline std::vector<std::int64_t> quantity_target(const GroupConfig& gc, const GoalSignal& signal,
                                                 const GoalSignal& quantity, const std::optional<GoalSignal>& subordinate,
                                                 const RedistributionResult& r) {
  std::int64_t total = 0;
  for (double v : quantity.values) total += static_cast<std::int64_t>(v);
  if (gc.signal == SignalKind::quantity) return round_to_integers(r.final_signal, total);
  if (total == 0) return std::vector<std::int64_t>(quantity.size(), 0);
  GoalSignal c_target{SignalKind::concentration, r.final_signal, signal.parameter_order, signal.denominators};
  if (gc.signal == SignalKind::difference)
    for (std::size_t i = 0; i < c_target.size(); ++i) c_target.values[i] += subordinate->values[i];
  GoalSignal q = concentration_to_quantity(c_target, total);
  return {q.values.begin(), q.values.end()};
}

// Processes one group against `m`; returns the outcome and the modified file.
inline std::pair<GroupOutcome, Microfile> process_group(const Microfile& m, const GroupConfig& gc,
                                                        const PipelineConfig& cfg, std::uint64_t seed) {
  GroupOutcome out;
  out.id = gc.group.id;
  out.kind = gc.signal;
  out.seed = seed;
  auto& t = out.timings;
  out.signal = run_stage("signal", t, [&] { return group_signal(m, gc, &out.subordinate); });
  out.quantity_before = run_stage("signal", t, [&] { return quantity_signal(m, gc.group); });
  if (gc.target) {
    out.target = *gc.target;
  } else {
    out.decomposition = run_stage("decompose", t, [&] { return group_decomposition(out.signal, gc); });
    out.redistribution = run_stage("redistribute", t, [&] { return group_redistribution(out.signal, *out.decomposition, gc); });
    out.target = run_stage("target", t, [&] {
      return quantity_target(gc, out.signal, out.quantity_before, out.subordinate, *out.redistribution);
    });
  }
  out.plan = run_stage("remap", t, [&] {
    const InfluentialWeights w = weights_from_schema(m, gc.group.parameter, cfg.category_match, cfg.category_mismatch);
    return plan_swaps(m, gc.group, out.target, w, RemapOptions{gc.candidate_cap, seed});
  });
  Microfile modified = run_stage("apply", t, [&] { return apply_swaps(m, out.plan); });
  out.quantity_after = run_stage("verify", t, [&] { return quantity_signal(modified, gc.group); });
  for (std::size_t i = 0; i < out.target.size(); ++i)
    if (static_cast<std::int64_t>(out.quantity_after.values[i]) != out.target[i])
      throw StageError("verify", "recomputed quantity differs from target at position " + std::to_string(i + 1));
  return {std::move(out), std::move(modified)};
}

// Per-group seeds are derived from the config seed and the group's position.
inline std::uint64_t group_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Groups are processed in declared order; each sees the previous groups' swaps.
inline RunResult run_pipeline(const PipelineConfig& cfg, Microfile input) {
  RunResult result;
  result.seed = cfg.seed;
  Microfile current = std::move(input);
  for (std::size_t i = 0; i < cfg.groups.size(); ++i) {
    auto [outcome, next] = process_group(current, cfg.groups[i], cfg, group_seed(cfg.seed, i));
    result.groups.push_back(std::move(outcome));
    current = std::move(next);
  }
  result.output = std::move(current);
  return result;
}

inline nlohmann::json to_json(const GroupOutcome& g) {
  nlohmann::json j;
  j["id"] = g.id;
  j["signal_kind"] = std::string(to_string(g.kind));
  j["seed"] = g.seed;
  j["parameter_order"] = g.signal.parameter_order;
  j["signal_before"] = g.signal.values;
  if (!g.signal.denominators.empty()) j["superset_counts"] = g.signal.denominators;
  if (g.subordinate) j["subordinate_signal"] = g.subordinate->values;
  j["quantity_before"] = g.quantity_before.values;
  if (g.decomposition) {
    j["wavelet"] = {{"family", g.decomposition->filter.name}, {"level", g.decomposition->level}};
    j["approx_before"] = g.decomposition->approx;
  }
  if (g.redistribution) {
    j["approx_after"] = g.redistribution->approx;
    j["reassembled"] = g.redistribution->reassembled;
    j["shift"] = g.redistribution->shift;
    j["repair"] = std::string(to_string(g.redistribution->repair));
    j["signal_after"] = g.redistribution->final_signal;
  }
  j["quantity_target"] = g.target;
  j["quantity_after"] = g.quantity_after.values;
  j["swap_count"] = g.plan.swaps.size();
  j["total_swap_cost"] = g.plan.total_cost;
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& s : g.timings) timings.push_back({{"stage", s.stage}, {"ms", s.milliseconds}});
  j["timings"] = timings;
  return j;
}

inline nlohmann::json to_json(const RunResult& r, const PipelineConfig& cfg) {
  nlohmann::json j;
  j["input"] = cfg.input.string();
  j["output"] = cfg.output.string();
  j["seed"] = r.seed;
  j["records"] = r.output.size();
  j["groups"] = nlohmann::json::array();
  for (const auto& g : r.groups) j["groups"].push_back(to_json(g));
  return j;
}

// Renders every report artifact in memory; nothing is written on failure.
inline std::vector<std::pair<std::filesystem::path, std::string>> render_report(const RunResult& r,
                                                                                const PipelineConfig& cfg) {
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  const auto& dir = cfg.report_dir;
  files.emplace_back(dir / "report.json", to_json(r, cfg).dump(2) + "\n");
  for (const auto& g : r.groups) {
    files.emplace_back(dir / (g.id + ".signal.csv"), report::signal_csv(g.signal));
    files.emplace_back(dir / (g.id + ".signal.svg"),
                       report::svg_chart(g.signal, g.id + ": initial " + std::string(to_string(g.kind)) + " signal"));
    if (g.redistribution) {
      files.emplace_back(dir / (g.id + ".modified.csv"),
                         report::signal_csv(g.signal.parameter_order, g.redistribution->final_signal));
      files.emplace_back(dir / (g.id + ".modified.svg"),
                         report::svg_chart(g.signal.parameter_order, g.redistribution->final_signal,
                                           g.id + ": modified " + std::string(to_string(g.kind)) + " signal"));
    }
    files.emplace_back(dir / (g.id + ".quantity_after.csv"), report::signal_csv(g.quantity_after));
    files.emplace_back(dir / (g.id + ".swaps.csv"), report::swap_plan_csv(g.plan));
  }
  return files;
}

}  // namespace grpanon

#endif  // GRPANON_PIPELINE_HPP
