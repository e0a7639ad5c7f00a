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

#include "grpanon/microfile.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace grpanon {
namespace {

using testing::decl;
using testing::error_message;
using testing::from_csv;

Schema toy_schema() {
  return {{{"id", AttributeKind::nominal, AttributeRole::plain, 0.0}, true},
          decl("region", AttributeKind::nominal, AttributeRole::parameter),
          decl("status", AttributeKind::nominal, AttributeRole::vital, 1.0),
          decl("age", AttributeKind::ordinal, AttributeRole::influential, 1.0)};
}

const char* kToy =
    "id,region,status,age,note\n"
    "1,A,x,30,hello\n"
    "2,B,y,41,\n"
    "3,C,x,25,\"quoted, text\"\n"
    "4,D,x,52,z\n"
    "5,A,y,19,z\n";

GroupSpec toy_group() {
  GroupSpec g;
  g.id = "toy";
  g.vital = {{"status", {{"x"}, {}}}};
  g.parameter = "region";
  g.parameter_order = {"A", "B", "C", "D"};
  return g;
}

TEST(MicrofileTest, DropsIdentifierAndKeepsUndeclaredColumns) {
  std::vector<std::string> warnings;
  ScopedWarningSink sink{[&](const std::string& w) { warnings.push_back(w); }};
  std::istringstream in(kToy);
  Microfile m = read_microfile(in, toy_schema());
  EXPECT_EQ(m.size(), 5u);
  ASSERT_EQ(m.width(), 4u);
  EXPECT_FALSE(m.find_column("id"));
  const auto note = m.column_index("note");
  EXPECT_EQ(m.attribute(note).role, AttributeRole::plain);
  EXPECT_EQ(m.text(2, note), "quoted, text");
  EXPECT_DOUBLE_EQ(m.number(3, m.column_index("age")), 52.0);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("'id'"), std::string::npos);
}

TEST(MicrofileTest, RaggedRowNamesTheRow) {
  const std::string msg = error_message([] { from_csv("region,status,age\nA,x,1\nB,y\n", toy_schema()); });
  EXPECT_NE(msg.find("missing from header"), std::string::npos);  // id column is declared
  Schema s = toy_schema();
  s.erase(s.begin());
  const std::string ragged = error_message([&] { from_csv("region,status,age\nA,x,1\nB,x,2\nC,y\n", s); });
  EXPECT_NE(ragged.find("row 3"), std::string::npos) << ragged;
  EXPECT_THROW(from_csv("region,status,age\nA,x,1\nB,y\n", s), ParseError);
}

TEST(MicrofileTest, RejectsBadCells) {
  Schema s = toy_schema();
  s.erase(s.begin());
  EXPECT_THROW(from_csv("region,status,age\nA,x,old\n", s), ParseError);
  EXPECT_THROW(from_csv("region,status,age\nA,,3\n", s), ParseError);
  EXPECT_THROW(from_csv("region,region,age\nA,x,3\n", s), ParseError);
  EXPECT_THROW(from_csv("", s), ParseError);
  s.push_back(decl("income", AttributeKind::ordinal, AttributeRole::plain));
  Microfile m = from_csv("region,status,age,income\nA,x,3,\n", s);
  EXPECT_TRUE(std::isnan(m.number(0, m.column_index("income"))));
}

TEST(MicrofileTest, ConstructorValidatesColumns) {
  const Attribute a{"a", AttributeKind::nominal, AttributeRole::plain, 0.0};
  EXPECT_THROW(Microfile({a, a}, {{"1"}, {"2"}}), SchemaError);
  EXPECT_THROW(Microfile({a, {"b", AttributeKind::nominal, AttributeRole::plain, 0.0}}, {{"1"}, {"2", "3"}}),
               SchemaError);
  EXPECT_THROW(Microfile({{"w", AttributeKind::nominal, AttributeRole::influential, -1.0}}, {{"1"}}), SchemaError);
  EXPECT_THROW(Microfile({a}, {}), SchemaError);
}

TEST(MicrofileTest, MembersSelectsByVitalValues) {
  Microfile m = from_csv(kToy, toy_schema());
  GroupSpec g = toy_group();
  EXPECT_EQ(members(m, g), (std::vector<std::size_t>{0, 2, 3}));
  g.vital.clear();
  EXPECT_EQ(members(m, g).size(), m.size());
  g.vital = {{"status", {{"absent"}, {}}}};
  EXPECT_TRUE(members(m, g).empty());
  g.vital = {{"age", {{}, {{20.0, 45.0}}}}};
  EXPECT_EQ(members(m, g), (std::vector<std::size_t>{0, 1, 2}));
  g.vital = {{"age", {{"52"}, {}}}, {"status", {{"x", "y"}, {}}}};
  EXPECT_EQ(members(m, g), (std::vector<std::size_t>{3}));
}

TEST(MicrofileTest, OrdinalValuesCompareNumerically) {
  Microfile m = from_csv(kToy, toy_schema());
  GroupSpec g = toy_group();
  g.vital = {{"age", {{"30.0"}, {}}}};
  EXPECT_EQ(members(m, g), (std::vector<std::size_t>{0}));
}

TEST(MicrofileTest, FixtureMembersMatchPublishedTotal) {
  const Microfile& m = testing::military_fixture();
  const GroupSpec& g = testing::quantity_config().groups.front().group;
  EXPECT_EQ(members(m, g).size(), 6272u);
  EXPECT_NO_THROW(validate_group(m, g));
}

TEST(MicrofileTest, ValidateGroupRejectsMalformedGroups) {
  Microfile m = from_csv(kToy, toy_schema());
  GroupSpec g = toy_group();
  EXPECT_NO_THROW(validate_group(m, g));

  GroupSpec bad = g;
  bad.parameter = "status";
  EXPECT_THROW(validate_group(m, bad), SchemaError);
  bad = g;
  bad.parameter = "nope";
  EXPECT_THROW(validate_group(m, bad), SchemaError);
  bad = g;
  bad.vital.push_back({"region", {{"A"}, {}}});
  EXPECT_THROW(validate_group(m, bad), SchemaError);
  bad = g;
  bad.vital = {{"missing", {{"1"}, {}}}};
  EXPECT_THROW(validate_group(m, bad), SchemaError);
  bad = g;
  bad.parameter_order = {"A", "B", "C"};
  EXPECT_THROW(validate_group(m, bad), DomainError);
  bad = g;
  bad.parameter_order = {"A", "B", "C", "A"};
  EXPECT_THROW(validate_group(m, bad), DomainError);
  bad = g;
  bad.superset = std::vector<VitalCondition>{{"age", {{}, {{0.0, 40.0}}}}};
  EXPECT_THROW(validate_group(m, bad), DomainError);  // member aged 52 is outside
}

TEST(MicrofileTest, WriteThenLoadIsIdentity) {
  Microfile m = from_csv(kToy, toy_schema());
  const auto path = testing::scratch_dir("microfile_roundtrip") / "out.csv";
  write_microfile(m, path);
  Schema s = toy_schema();
  s.erase(s.begin());
  EXPECT_EQ(load_microfile(path, s), m);
}

TEST(MicrofileTest, EmptyRecordSetWritesHeaderOnly) {
  Schema s = toy_schema();
  s.erase(s.begin());
  Microfile m = from_csv("region,status,age\n", s);
  EXPECT_EQ(m.size(), 0u);
  std::ostringstream out;
  write_microfile(m, out);
  EXPECT_EQ(out.str(), "region,status,age\n");
}

TEST(MicrofileTest, SwappedCellsTouchOnlyOneColumn) {
  Microfile m = from_csv(kToy, toy_schema());
  const auto col = m.column_index("region");
  const std::pair<std::size_t, std::size_t> swaps[] = {{0, 1}};
  Microfile s = m.with_swapped_cells(col, swaps);
  EXPECT_EQ(s.text(0, col), "B");
  EXPECT_EQ(s.text(1, col), "A");
  for (std::size_t c = 0; c < m.width(); ++c)
    if (c != col) {
      EXPECT_EQ(s.column(c), m.column(c));
    }
}

TEST(MicrofileTest, LoadErrorsNameTheFile) {
  const auto dir = testing::scratch_dir("microfile_errors");
  std::ofstream(dir / "bad.csv") << "region,status,age\nA,x\n";
  Schema s = toy_schema();
  s.erase(s.begin());
  const std::string msg = error_message([&] { load_microfile(dir / "bad.csv", s); });
  EXPECT_NE(msg.find("bad.csv"), std::string::npos);
  EXPECT_NE(msg.find("row 1"), std::string::npos);
  EXPECT_THROW(load_microfile(dir / "missing.csv", s), Error);
}

}  // namespace
}  // namespace grpanon
