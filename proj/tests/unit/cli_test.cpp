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

// Runs the installed command-line tool end to end.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "grpanon/microfile.hpp"
#include "test_support.hpp"

namespace grpanon {
namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + GRPANON_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string sample(const char* name) { return "\"" + (testing::source_dir() / "samples" / name).string() + "\""; }

TEST(CliTest, RunWritesOutputAndReport) {
  const auto dir = testing::scratch_dir("cli_run");
  const auto out = dir / "out.csv";
  const int code = run_cli("run --config " + sample("military_quantity.yaml") + " --output \"" + out.string() +
                               "\" --report \"" + (dir / "report").string() + "\"",
                           dir / "log.txt");
  ASSERT_EQ(code, 0) << slurp(dir / "log.txt");
  const auto& cfg = testing::quantity_config();
  Schema schema = cfg.schema;
  schema.erase(schema.begin());  // identifier column is not written back
  const Microfile m = load_microfile(out, schema);
  EXPECT_EQ(quantity_signal(m, cfg.groups[0].group).values, testing::published("quantity", "final"));
  const auto report = nlohmann::json::parse(slurp(dir / "report" / "report.json"));
  EXPECT_EQ(report["seed"], cfg.seed);
  EXPECT_EQ(report["groups"][0]["quantity_after"].get<std::vector<double>>(), testing::published("quantity", "final"));
  EXPECT_TRUE(fs::exists(dir / "report" / "military_quantity.modified.svg"));
}

TEST(CliTest, SignalAndDecomposeSubcommands) {
  const auto dir = testing::scratch_dir("cli_signal");
  ASSERT_EQ(run_cli("signal --config " + sample("military_quantity.yaml") + " --output \"" +
                        (dir / "q.csv").string() + "\" --report \"" + dir.string() + "\"",
                    dir / "log.txt"),
            0);
  const std::string csv = slurp(dir / "q.csv");
  EXPECT_EQ(csv.rfind("parameter,value\n06010,19\n", 0), 0u) << csv;
  EXPECT_NE(csv.find("06700,4337\n"), std::string::npos);
  EXPECT_NE(slurp(dir / "military_quantity.signal.svg").find("<polyline"), std::string::npos);

  ASSERT_EQ(run_cli("decompose --config " + sample("military_quantity.yaml") + " --output \"" +
                        (dir / "coeff.csv").string() + "\"",
                    dir / "log.txt"),
            0);
  EXPECT_NE(slurp(dir / "coeff.csv").find("a2,1,2272.128"), std::string::npos);
}

TEST(CliTest, RedistributeAndRemapSubcommands) {
  const auto dir = testing::scratch_dir("cli_stages");
  ASSERT_EQ(run_cli("redistribute --config " + sample("military_quantity.yaml") + " --output \"" +
                        (dir / "mod.csv").string() + "\"",
                    dir / "log.txt"),
            0);
  EXPECT_NE(slurp(dir / "log.txt").find("# shift 2150"), std::string::npos);
  ASSERT_EQ(run_cli("remap --config " + sample("military_quantity.yaml") + " --output \"" +
                        (dir / "swaps.csv").string() + "\"",
                    dir / "log.txt"),
            0);
  EXPECT_EQ(slurp(dir / "swaps.csv").rfind("member_index,partner_index,cost\n", 0), 0u);
}

TEST(CliTest, ConfigErrorsExitWithTwo) {
  const auto dir = testing::scratch_dir("cli_config");
  std::ofstream(dir / "bad.yaml") << "input: x.csv\nschema: []\ngroups: []\n";
  EXPECT_EQ(run_cli("run --config \"" + (dir / "bad.yaml").string() + "\"", dir / "log.txt"), 2);
  EXPECT_NE(slurp(dir / "log.txt").find("bad.yaml:2:"), std::string::npos) << slurp(dir / "log.txt");
  EXPECT_EQ(run_cli("run", dir / "log.txt"), 2);
  EXPECT_EQ(run_cli("frobnicate", dir / "log.txt"), 2);
}

TEST(CliTest, StageErrorsExitWithOneAndWriteNothing) {
  const auto dir = testing::scratch_dir("cli_stage_error");
  std::string text = slurp(testing::source_dir() / "samples" / "military_quantity.yaml");
  const auto pos = text.find("    constraints:");
  text.insert(pos, "    target: [392, 392, 392, 392, 392, 392, 392, 392, 392, 392, 392, 392, 392, 392, 392, 393]\n");
  const auto cfg = dir / "mismatch.yaml";
  std::ofstream(cfg) << text;
  const int code = run_cli("run --config \"" + cfg.string() + "\" --input \"" +
                               (testing::source_dir() / "data" / "military_fixture.csv").string() + "\" --output \"" +
                               (dir / "out.csv").string() + "\" --report \"" + (dir / "rep").string() + "\"",
                           dir / "log.txt");
  EXPECT_EQ(code, 1) << slurp(dir / "log.txt");
  EXPECT_NE(slurp(dir / "log.txt").find("[remap]"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out.csv"));
  EXPECT_FALSE(fs::exists(dir / "rep"));
}

TEST(CliTest, VerifyReportsEveryFixture) {
  const auto dir = testing::scratch_dir("cli_verify");
  const int code = run_cli("verify", dir / "log.txt");
  const std::string log = slurp(dir / "log.txt");
  EXPECT_NE(log.find("quantity a2"), std::string::npos);
  EXPECT_NE(log.find("quantity final (+-1)"), std::string::npos);
  // Exactly one published value fails: the concentration solution's position-5 row.
  EXPECT_EQ(code, 3);
  EXPECT_NE(log.find("concentration printed solution feasible     "), std::string::npos);
  EXPECT_EQ(run_cli("verify --fixtures \"" + (dir / "absent.yaml").string() + "\"", dir / "log2.txt"), 3);
  EXPECT_NE(slurp(dir / "log2.txt").find("fixture missing"), std::string::npos);
}

}  // namespace
}  // namespace grpanon
