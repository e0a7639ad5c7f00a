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

#include "grpanon/verify.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "test_support.hpp"

namespace grpanon {
namespace {

const FixtureCheck* find(const std::vector<FixtureCheck>& checks, const std::string& name) {
  auto it = std::find_if(checks.begin(), checks.end(), [&](const FixtureCheck& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

std::filesystem::path fixture_file() { return testing::source_dir() / "data" / "published_fixtures.yaml"; }

TEST(VerifyTest, ReproducesPublishedValues) {
  const auto checks = verify_fixtures(fixture_file());
  EXPECT_GE(checks.size(), 19u);
  for (const auto& c : checks) {
    if (c.name == "concentration printed solution feasible") {
      // The printed concentration solution misses its position-5 lower bound.
      EXPECT_FALSE(c.passed);
      EXPECT_NEAR(c.max_delta, 0.0037, 1e-4);
    } else {
      EXPECT_TRUE(c.passed) << c.name << ": " << c.max_delta << " " << c.detail;
    }
  }
}

TEST(VerifyTest, PerturbedFilterIsDetected) {
  FilterPair f = daubechies2();
  f.lowpass[0] += 1e-3;
  const auto checks = verify_fixtures(fixture_file(), f);
  const FixtureCheck* a2 = find(checks, "quantity a2");
  ASSERT_NE(a2, nullptr);
  EXPECT_FALSE(a2->passed);
  EXPECT_GT(a2->max_delta, 1e-3);
}

TEST(VerifyTest, MissingFixtureIsReported) {
  const auto checks = verify_fixtures(testing::scratch_dir("verify_missing") / "none.yaml");
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_FALSE(checks[0].passed);
  EXPECT_NE(checks[0].detail.find("fixture missing"), std::string::npos);
}

TEST(VerifyTest, MissingMicrofileIsReported) {
  const auto dir = testing::scratch_dir("verify_partial");
  std::string text;
  {
    std::ifstream in(fixture_file());
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = text.find("../samples/military_concentration.yaml");
  text.replace(pos, std::string("../samples/military_concentration.yaml").size(), "absent.yaml");
  std::ofstream(dir / "fixtures.yaml") << text;
  const auto checks = verify_fixtures(dir / "fixtures.yaml");
  const FixtureCheck* row = find(checks, "concentration fixtures");
  ASSERT_NE(row, nullptr);
  EXPECT_FALSE(row->passed);
  EXPECT_NE(row->detail.find("fixture missing"), std::string::npos);
  EXPECT_TRUE(find(checks, "quantity a2")->passed);
}

}  // namespace
}  // namespace grpanon
