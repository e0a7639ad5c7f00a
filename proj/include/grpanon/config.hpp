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

#ifndef GRPANON_CONFIG_HPP
#define GRPANON_CONFIG_HPP

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "grpanon/error.hpp"
#include "grpanon/goal_signal.hpp"
#include "grpanon/microfile.hpp"
#include "grpanon/redistribute.hpp"

namespace grpanon {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Everything needed to process one group.
struct GroupConfig {
  GroupSpec group;
  SignalKind signal = SignalKind::quantity;
  // Subordinate population for difference signals; shares the main group's
  // parameter attribute and order.
  std::optional<GroupSpec> subordinate;
  std::string wavelet = "db2";
  int level = 2;
  std::optional<ConstraintSpec> constraints;
  std::optional<std::vector<double>> warm_start;
  std::optional<double> shift;
  double margin = 0.0;
  Repair repair = Repair::mean_fix;
  // Explicit quantity target; bypasses redistribution when given.
  std::optional<std::vector<std::int64_t>> target;
  std::size_t candidate_cap = 10000;
};

struct PipelineConfig {
  std::filesystem::path source;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path report_dir;
  Schema schema;
  double category_match = 0.0;
  double category_mismatch = 1.0;
  std::uint64_t seed = 0;
  std::vector<GroupConfig> groups;

  const GroupConfig& group(std::string_view id) const {
    for (const auto& g : groups)
      if (g.group.id == id) return g;
    throw ConfigError("no group with id '" + std::string(id) + "'");
  }
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    const auto mark = node.Mark();
    std::string where = source_;
    if (mark.line >= 0) where += ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
    throw ConfigError(where + ": " + what);
  }

  void only_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, const std::string& ctx) const {
    if (!map.IsMap()) fail(map, ctx + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (auto a : allowed) ok = ok || a == key;
      if (!ok) fail(kv.first, "unknown key '" + key + "' in " + ctx);
    }
  }

  const YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& ctx) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, ctx + " is missing required key '" + key + "'");
    return n;
  }

  template <typename T>
  T scalar(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, what + " has an invalid value '" + n.Scalar() + "'");
    }
  }

  template <typename T>
  std::vector<T> sequence(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, what + " must be a list");
    std::vector<T> out;
    for (const auto& item : n) out.push_back(scalar<T>(item, what + " element"));
    return out;
  }

  AttributeDecl attribute(const YAML::Node& n) const {
    only_keys(n, {"name", "kind", "role", "weight"}, "schema entry");
    AttributeDecl d;
    d.attribute.name = scalar<std::string>(require(n, "name", "schema entry"), "name");
    const std::string ctx = "attribute '" + d.attribute.name + "'";
    const std::string role = n["role"] ? scalar<std::string>(n["role"], "role") : "plain";
    if (role == "identifier") {
      d.identifier = true;
    } else if (role == "vital") {
      d.attribute.role = AttributeRole::vital;
    } else if (role == "parameter") {
      d.attribute.role = AttributeRole::parameter;
    } else if (role == "influential") {
      d.attribute.role = AttributeRole::influential;
    } else if (role == "plain") {
      d.attribute.role = AttributeRole::plain;
    } else {
      fail(n["role"], ctx + ": role must be one of identifier, vital, parameter, influential, plain");
    }
    const std::string kind = n["kind"] ? scalar<std::string>(n["kind"], "kind") : "nominal";
    if (kind == "ordinal") {
      d.attribute.kind = AttributeKind::ordinal;
    } else if (kind != "nominal") {
      fail(n["kind"], ctx + ": kind must be ordinal or nominal");
    }
    if (n["weight"]) {
      d.attribute.weight = scalar<double>(n["weight"], "weight");
      if (d.attribute.weight < 0.0) fail(n["weight"], ctx + ": weight must be non-negative");
      if (!d.attribute.influential()) fail(n["weight"], ctx + ": only vital or influential attributes carry a weight");
    } else if (d.attribute.influential()) {
      d.attribute.weight = 1.0;
    }
    return d;
  }

  std::vector<VitalCondition> conditions(const YAML::Node& n, const Schema& schema, const std::string& ctx) const {
    if (!n.IsMap()) fail(n, ctx + " must map attribute names to value lists");
    std::vector<VitalCondition> out;
    for (const auto& kv : n) {
      const auto name = kv.first.as<std::string>();
      const AttributeDecl* decl = nullptr;
      for (const auto& d : schema)
        if (d.attribute.name == name) decl = &d;
      if (!decl) fail(kv.first, ctx + ": attribute '" + name + "' is not in the schema");
      if (decl->identifier) fail(kv.first, ctx + ": identifier attribute '" + name + "' cannot select records");
      VitalCondition cond{name, {}};
      const YAML::Node values = kv.second;
      std::vector<YAML::Node> items;
      if (values.IsSequence()) {
        for (const auto& v : values) items.push_back(v);
      } else {
        items.push_back(values);
      }
      for (const auto& v : items) {
        const auto text = scalar<std::string>(v, ctx + " value");
        const auto dots = text.find("..");
        if (dots != std::string::npos) {
          auto lo = grpanon::detail::parse_number(std::string_view(text).substr(0, dots));
          auto hi = grpanon::detail::parse_number(std::string_view(text).substr(dots + 2));
          if (!lo || !hi || *lo > *hi) fail(v, ctx + ": malformed range '" + text + "'");
          if (decl->attribute.kind != AttributeKind::ordinal)
            fail(v, ctx + ": ranges are only allowed for ordinal attributes");
          cond.accepted.ranges.emplace_back(*lo, *hi);
        } else {
          cond.accepted.values.push_back(text);
        }
      }
      out.push_back(std::move(cond));
    }
    return out;
  }

  ConstraintSpec constraints(const YAML::Node& n, std::size_t m, GroupConfig& gc) const {
    only_keys(n, {"rows", "objective", "nonnegative", "warm_start"}, "constraints");
    ConstraintSpec spec;
    const YAML::Node rows = require(n, "rows", "constraints");
    if (!rows.IsSequence() || rows.size() == 0) fail(rows, "constraints.rows must be a non-empty list");
    for (const auto& r : rows) {
      if (!r.IsSequence() || r.size() != 3) fail(r, "constraint row must be [position, relation, bound|original]");
      ConstraintRow row;
      const auto pos = scalar<long long>(r[0], "constraint position");
      if (pos < 1 || static_cast<std::size_t>(pos) > m)
        fail(r[0], "constraint position must be within 1.." + std::to_string(m));
      row.position = static_cast<std::size_t>(pos);
      const auto rel = scalar<std::string>(r[1], "constraint relation");
      if (rel == "<=") {
        row.relation = Relation::less_equal;
      } else if (rel == ">=") {
        row.relation = Relation::greater_equal;
      } else if (rel == "=") {
        row.relation = Relation::equal;
      } else {
        fail(r[1], "constraint relation must be <=, >= or =");
      }
      if (scalar<std::string>(r[2], "constraint bound") != "original") row.bound = scalar<double>(r[2], "constraint bound");
      spec.rows.push_back(row);
    }
    if (n["nonnegative"]) spec.nonnegative = scalar<bool>(n["nonnegative"], "constraints.nonnegative");
    if (const YAML::Node obj = n["objective"]) {
      if (obj.IsScalar()) {
        if (obj.Scalar() != "feasibility") fail(obj, "objective must be 'feasibility' or {maximize|minimize: [positions]}");
      } else {
        only_keys(obj, {"maximize", "minimize"}, "objective");
        if (obj.size() != 1) fail(obj, "objective takes exactly one of maximize or minimize");
        const bool max = static_cast<bool>(obj["maximize"]);
        const YAML::Node list = max ? obj["maximize"] : obj["minimize"];
        spec.objective = max ? ObjectiveKind::maximize : ObjectiveKind::minimize;
        for (auto p : sequence<long long>(list, "objective positions")) {
          if (p < 1 || static_cast<std::size_t>(p) > m) fail(list, "objective position out of range");
          spec.objective_positions.push_back(static_cast<std::size_t>(p));
        }
        if (spec.objective_positions.empty()) fail(list, "objective needs at least one position");
      }
    }
    if (n["warm_start"]) gc.warm_start = sequence<double>(n["warm_start"], "constraints.warm_start");
    return spec;
  }

  GroupConfig group(const YAML::Node& n, const Schema& schema) const {
    only_keys(n,
              {"id", "vital", "parameter", "order", "superset", "signal", "subordinate", "wavelet", "constraints",
               "shift", "margin", "repair", "target", "candidate_cap"},
              "group");
    GroupConfig gc;
    GroupSpec& g = gc.group;
    g.id = scalar<std::string>(require(n, "id", "group"), "group id");
    const std::string ctx = "group '" + g.id + "'";
    g.vital = conditions(require(n, "vital", ctx), schema, ctx + " vital");
    g.parameter = scalar<std::string>(require(n, "parameter", ctx), "parameter");
    bool found = false;
    for (const auto& d : schema)
      if (d.attribute.name == g.parameter) {
        found = true;
        if (d.attribute.role != AttributeRole::parameter)
          fail(n["parameter"], ctx + ": attribute '" + g.parameter + "' is not declared with role parameter");
      }
    if (!found) fail(n["parameter"], ctx + ": parameter attribute '" + g.parameter + "' is not in the schema");
    for (const auto& v : g.vital)
      if (v.attribute == g.parameter) fail(n["vital"], ctx + ": parameter attribute cannot be vital");
    const YAML::Node order = require(n, "order", ctx);
    g.parameter_order = sequence<std::string>(order, "order");
    if (g.parameter_order.size() < 4) fail(order, ctx + ": order needs at least 4 parameter values");
    if (std::set<std::string>(g.parameter_order.begin(), g.parameter_order.end()).size() != g.parameter_order.size())
      fail(order, ctx + ": parameter values in order must be distinct");
    if (n["superset"]) g.superset = conditions(n["superset"], schema, ctx + " superset");

    if (n["signal"]) {
      const auto s = scalar<std::string>(n["signal"], "signal");
      if (s == "quantity") {
        gc.signal = SignalKind::quantity;
      } else if (s == "concentration") {
        gc.signal = SignalKind::concentration;
      } else if (s == "difference") {
        gc.signal = SignalKind::difference;
      } else {
        fail(n["signal"], ctx + ": signal must be quantity, concentration or difference");
      }
    }
    if (gc.signal != SignalKind::quantity && !g.superset)
      fail(n, ctx + ": " + std::string(to_string(gc.signal)) + " signals need a superset");
    if (gc.signal == SignalKind::difference) {
      const YAML::Node sub = require(n, "subordinate", ctx);
      only_keys(sub, {"vital", "superset"}, "subordinate");
      GroupSpec s;
      s.id = g.id + ".subordinate";
      s.vital = conditions(require(sub, "vital", "subordinate"), schema, ctx + " subordinate vital");
      s.parameter = g.parameter;
      s.parameter_order = g.parameter_order;
      s.superset = sub["superset"] ? conditions(sub["superset"], schema, ctx + " subordinate superset") : g.superset;
      gc.subordinate = std::move(s);
    } else if (n["subordinate"]) {
      fail(n["subordinate"], ctx + ": subordinate is only valid for difference signals");
    }
    // Quantity signals are mean-fixed by default; concentrations are fixed in
    // the quantity domain when converted.
    gc.repair = gc.signal == SignalKind::quantity ? Repair::mean_fix : Repair::none;

    if (const YAML::Node w = n["wavelet"]) {
      only_keys(w, {"family", "level"}, "wavelet");
      if (w["family"]) gc.wavelet = scalar<std::string>(w["family"], "wavelet.family");
      if (gc.wavelet != "haar" && gc.wavelet != "db1" && gc.wavelet != "db2" && gc.wavelet != "db4")
        fail(w["family"], ctx + ": wavelet family must be haar, db1, db2 or db4");
      if (w["level"]) gc.level = scalar<int>(w["level"], "wavelet.level");
      if (gc.level < 1) fail(w, ctx + ": wavelet level must be positive");
    }
    const std::size_t m = g.parameter_order.size();
    if (m % (std::size_t{1} << gc.level) != 0)
      fail(n["wavelet"] ? n["wavelet"] : order, ctx + ": " + std::to_string(m) + " parameter values are not divisible by 2^" +
                                                   std::to_string(gc.level));
    if (n["constraints"]) gc.constraints = constraints(n["constraints"], m, gc);
    if (gc.warm_start && gc.warm_start->size() != (m >> gc.level))
      fail(n["constraints"]["warm_start"], ctx + ": warm_start needs " + std::to_string(m >> gc.level) + " values");
    if (const YAML::Node s = n["shift"]) {
      if (!(s.IsScalar() && s.Scalar() == "auto")) gc.shift = scalar<double>(s, "shift");
    }
    if (n["margin"]) gc.margin = scalar<double>(n["margin"], "margin");
    if (const YAML::Node r = n["repair"]) {
      const auto s = scalar<std::string>(r, "repair");
      if (s == "mean_fix") {
        gc.repair = Repair::mean_fix;
      } else if (s == "normalize") {
        gc.repair = Repair::normalize_mean_std;
      } else if (s == "none") {
        gc.repair = Repair::none;
      } else {
        fail(r, ctx + ": repair must be mean_fix, normalize or none");
      }
    }
    if (const YAML::Node t = n["target"]) {
      gc.target = sequence<std::int64_t>(t, "target");
      if (gc.target->size() != m) fail(t, ctx + ": target needs " + std::to_string(m) + " values");
    }
    if (!gc.target && !gc.constraints) fail(n, ctx + " needs either constraints or an explicit target");
    if (const YAML::Node c = n["candidate_cap"]) {
      const auto cap = scalar<long long>(c, "candidate_cap");
      if (cap < 1) fail(c, ctx + ": candidate_cap must be positive");
      gc.candidate_cap = static_cast<std::size_t>(cap);
    }
    return gc;
  }

  PipelineConfig pipeline(const YAML::Node& root, const std::filesystem::path& base) const {
    only_keys(root, {"input", "output", "report", "seed", "schema", "metric", "groups"}, "config");
    PipelineConfig cfg;
    auto resolve = [&](const YAML::Node& n, const std::string& what) {
      std::filesystem::path p = scalar<std::string>(n, what);
      return p.is_absolute() ? p : base / p;
    };
    cfg.input = resolve(require(root, "input", "config"), "input");
    if (root["output"]) cfg.output = resolve(root["output"], "output");
    if (root["report"]) cfg.report_dir = resolve(root["report"], "report");
    if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (const YAML::Node metric = root["metric"]) {
      only_keys(metric, {"match", "mismatch"}, "metric");
      if (metric["match"]) cfg.category_match = scalar<double>(metric["match"], "metric.match");
      if (metric["mismatch"]) cfg.category_mismatch = scalar<double>(metric["mismatch"], "metric.mismatch");
      if (cfg.category_match > cfg.category_mismatch) fail(metric, "metric.match must not exceed metric.mismatch");
    }
    const YAML::Node schema = require(root, "schema", "config");
    if (!schema.IsSequence() || schema.size() == 0) fail(schema, "schema must be a non-empty list");
    std::set<std::string> names;
    for (const auto& a : schema) {
      auto decl = attribute(a);
      if (!names.insert(decl.attribute.name).second) fail(a, "attribute '" + decl.attribute.name + "' declared twice");
      cfg.schema.push_back(std::move(decl));
    }
    const YAML::Node groups = require(root, "groups", "config");
    if (!groups.IsSequence() || groups.size() == 0) fail(groups, "groups must be a non-empty list");
    std::set<std::string> ids;
    for (const auto& g : groups) {
      auto gc = group(g, cfg.schema);
      if (!ids.insert(gc.group.id).second) fail(g, "duplicate group id '" + gc.group.id + "'");
      cfg.groups.push_back(std::move(gc));
    }
    return cfg;
  }

 private:
  std::string source_;
};

}  // namespace detail

// Parses a pipeline config from YAML text. Relative paths resolve against `base`.
inline PipelineConfig parse_config(const std::string& text, const std::string& source_name,
                                   const std::filesystem::path& base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(source_name + ": config is empty");
  detail::ConfigReader reader(source_name);
  PipelineConfig cfg = reader.pipeline(root, base);
  cfg.source = source_name;
  return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

}  // namespace grpanon

#endif  // GRPANON_CONFIG_HPP
