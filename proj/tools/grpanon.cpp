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

// grpanon command-line front end.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "grpanon/config.hpp"
#include "grpanon/pipeline.hpp"
#include "grpanon/report.hpp"
#include "grpanon/verify.hpp"

namespace {

using namespace grpanon;

constexpr int kOk = 0;
constexpr int kStageError = 1;
constexpr int kConfigError = 2;
constexpr int kVerifyFailed = 3;

struct CommonFlags {
  std::string config;
  std::string input;
  std::string output;
  std::string report;
  std::optional<std::uint64_t> seed;
  std::string group;
};

class ConfigFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_group) {
  cmd->add_option("-c,--config", f.config, "Pipeline config (YAML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--input", f.input, "Input microfile CSV (overrides config)");
  cmd->add_option("--output", f.output, "Output path (overrides config)");
  cmd->add_option("--report", f.report, "Report directory (overrides config)");
  cmd->add_option("--seed", f.seed, "Sampling seed (overrides config)");
  if (needs_group) cmd->add_option("-g,--group", f.group, "Group id (default: first group)");
}

PipelineConfig load(const CommonFlags& f) {
  PipelineConfig cfg = load_config(f.config);
  if (!f.input.empty()) cfg.input = f.input;
  if (!f.output.empty()) cfg.output = f.output;
  if (!f.report.empty()) cfg.report_dir = f.report;
  if (f.seed) cfg.seed = *f.seed;
  if (cfg.report_dir.empty())
    cfg.report_dir = cfg.output.empty() ? std::filesystem::path(".")
                                        : cfg.output.parent_path() / (cfg.output.stem().string() + ".report");
  return cfg;
}

const GroupConfig& pick_group(const PipelineConfig& cfg, const std::string& id) {
  if (cfg.groups.empty()) throw ConfigError(cfg.source.string() + ": no groups declared");
  return id.empty() ? cfg.groups.front() : cfg.group(id);
}

std::size_t group_index(const PipelineConfig& cfg, const GroupConfig& gc) {
  return static_cast<std::size_t>(&gc - cfg.groups.data());
}

Microfile load_input(const PipelineConfig& cfg) {
  try {
    return load_microfile(cfg.input, cfg.schema);
  } catch (const SchemaError& e) {
    throw ConfigFailure(cfg.source.string() + ": " + e.what());
  } catch (const Error& e) {
    throw StageError("load", e.what());
  }
}

// Writes `text` to `path`, or to stdout when `path` is empty.
void emit(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    report::write_text(path, text);
    std::cerr << "wrote " << path.string() << "\n";
  }
}

int cmd_signal(const CommonFlags& f) {
  const PipelineConfig cfg = load(f);
  const GroupConfig& gc = pick_group(cfg, f.group);
  const Microfile m = load_input(cfg);
  std::vector<StageTiming> t;
  const GoalSignal s = run_stage("signal", t, [&] { return group_signal(m, gc); });
  emit(f.output, report::signal_csv(s));
  const auto svg = cfg.report_dir / (gc.group.id + ".signal.svg");
  report::write_text(svg, report::svg_chart(s, gc.group.id + ": initial " + std::string(to_string(s.kind)) + " signal"));
  std::cerr << "wrote " << svg.string() << "\n";
  return kOk;
}

int cmd_decompose(const CommonFlags& f) {
  const PipelineConfig cfg = load(f);
  const GroupConfig& gc = pick_group(cfg, f.group);
  const Microfile m = load_input(cfg);
  std::vector<StageTiming> t;
  const GoalSignal s = run_stage("signal", t, [&] { return group_signal(m, gc); });
  const auto dec = run_stage("decompose", t, [&] { return group_decomposition(s, gc); });
  emit(f.output, report::coefficients_csv(dec));
  return kOk;
}

int cmd_redistribute(const CommonFlags& f) {
  const PipelineConfig cfg = load(f);
  const GroupConfig& gc = pick_group(cfg, f.group);
  const Microfile m = load_input(cfg);
  std::vector<StageTiming> t;
  const GoalSignal s = run_stage("signal", t, [&] { return group_signal(m, gc); });
  const auto dec = run_stage("decompose", t, [&] { return group_decomposition(s, gc); });
  const auto r = run_stage("redistribute", t, [&] { return group_redistribution(s, dec, gc); });
  std::string approx = "# approx_after";
  for (double v : r.approx) approx += "," + report::format_number(v);
  std::cerr << approx << "\n# shift " << report::format_number(r.shift) << "\n";
  emit(f.output, report::signal_csv(s.parameter_order, r.final_signal));
  return kOk;
}

int cmd_remap(const CommonFlags& f) {
  const PipelineConfig cfg = load(f);
  const GroupConfig& gc = pick_group(cfg, f.group);
  const Microfile m = load_input(cfg);
  const auto [outcome, modified] = process_group(m, gc, cfg, group_seed(cfg.seed, group_index(cfg, gc)));
  emit(f.output, report::swap_plan_csv(outcome.plan));
  std::cerr << outcome.plan.swaps.size() << " swaps, total cost " << report::format_number(outcome.plan.total_cost)
            << "\n";
  return kOk;
}

int cmd_run(const CommonFlags& f) {
  const PipelineConfig cfg = load(f);
  if (cfg.output.empty()) throw ConfigError(cfg.source.string() + ": no output path (set 'output' or pass --output)");
  Microfile m = load_input(cfg);
  const RunResult result = run_pipeline(cfg, std::move(m));
  // Everything is rendered before anything is written.
  auto files = render_report(result, cfg);
  std::ostringstream csv;
  write_microfile(result.output, csv);
  files.emplace_back(cfg.output, csv.str());
  try {
    for (const auto& [path, text] : files) report::write_text(path, text);
  } catch (const Error& e) {
    throw StageError("write", e.what());
  }
  for (const auto& g : result.groups)
    std::cout << g.id << ": " << g.plan.swaps.size() << " swaps, total cost "
              << report::format_number(g.plan.total_cost) << "\n";
  std::cout << "wrote " << cfg.output.string() << " and report in " << cfg.report_dir.string() << "\n";
  return kOk;
}

int cmd_verify(const std::string& fixtures) {
  const auto start = std::chrono::steady_clock::now();
  const auto checks = verify_fixtures(fixtures);
  bool ok = true;
  std::printf("%-44s %12s %10s  %s\n", "fixture", "max delta", "tolerance", "result");
  for (const auto& c : checks) {
    std::printf("%-44s %12.3g %10.3g  %s", c.name.c_str(), c.max_delta, c.tolerance, c.passed ? "PASS" : "FAIL");
    if (!c.detail.empty()) std::printf("  (%s)", c.detail.c_str());
    std::printf("\n");
    ok = ok && c.passed;
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  std::printf("%zu checks, %s, %.3f s\n", checks.size(), ok ? "all passed" : "FAILURES", dt.count());
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group anonymity for statistical microfiles"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string fixtures = GRPANON_DEFAULT_FIXTURES;

  auto* signal = app.add_subcommand("signal", "Write a group's goal signal as CSV and SVG");
  add_common(signal, flags, true);
  auto* decompose = app.add_subcommand("decompose", "Write a group's wavelet coefficients as CSV");
  add_common(decompose, flags, true);
  auto* redistribute = app.add_subcommand("redistribute", "Write a group's redistributed signal as CSV");
  add_common(redistribute, flags, true);
  auto* remap = app.add_subcommand("remap", "Write a group's swap plan as CSV");
  add_common(remap, flags, true);
  auto* run = app.add_subcommand("run", "Run every group and write the modified microfile and report");
  add_common(run, flags, false);
  auto* verify = app.add_subcommand("verify", "Check the published worked examples");
  verify->add_option("--fixtures", fixtures, "Fixture file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*signal) return cmd_signal(flags);
    if (*decompose) return cmd_decompose(flags);
    if (*redistribute) return cmd_redistribute(flags);
    if (*remap) return cmd_remap(flags);
    if (*run) return cmd_run(flags);
    if (*verify) return cmd_verify(fixtures);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageError;
  }
  return kOk;
}
