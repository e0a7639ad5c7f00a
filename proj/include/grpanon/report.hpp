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

#ifndef GRPANON_REPORT_HPP
#define GRPANON_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "grpanon/csv.hpp"
#include "grpanon/error.hpp"
#include "grpanon/goal_signal.hpp"
#include "grpanon/remap.hpp"
#include "grpanon/wavelet.hpp"

namespace grpanon::report {

// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

// Two columns: parameter value, signal value.
inline std::string signal_csv(std::span<const std::string> labels, std::span<const double> values) {
  std::ostringstream out;
  csv::write_record(out, {"parameter", "value"});
  for (std::size_t i = 0; i < values.size(); ++i) csv::write_record(out, {labels[i], format_number(values[i])});
  return out.str();
}

inline std::string signal_csv(const GoalSignal& s) { return signal_csv(s.parameter_order, s.values); }

// Rows of (component, index, value): a_k, d_k .. d_1, then the rebuilt
// approximation A_k and the summed detail component D.
inline std::string coefficients_csv(const WaveletDecomposition& dec) {
  std::ostringstream out;
  csv::write_record(out, {"component", "index", "value"});
  auto emit = [&](const std::string& name, std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) csv::write_record(out, {name, std::to_string(i + 1), format_number(v[i])});
  };
  const std::string k = std::to_string(dec.level);
  emit("a" + k, dec.approx);
  for (int j = dec.level; j >= 1; --j) emit("d" + std::to_string(j), dec.detail(j));
  emit("A" + k, approximation_component(dec));
  emit("D", detail_component(dec));
  return out.str();
}

inline std::string swap_plan_csv(const SwapPlan& plan) {
  std::ostringstream out;
  csv::write_record(out, {"member_index", "partner_index", "cost"});
  for (const auto& s : plan.swaps)
    csv::write_record(out, {std::to_string(s.member), std::to_string(s.partner), format_number(s.cost)});
  return out.str();
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Minimal static line chart of a goal signal: axes, zero line, polyline,
// position labels.
inline std::string svg_chart(std::span<const std::string> labels, std::span<const double> values,
                             const std::string& title) {
  constexpr double width = 720, height = 360, left = 70, right = 20, top = 40, bottom = 70;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  double lo = 0.0, hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;
  const std::size_t n = values.size();
  auto x_at = [&](std::size_t i) { return left + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1) : plot_w / 2); };
  auto y_at = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << y_at(0.0) << "\" x2=\"" << left + plot_w << "\" y2=\"" << y_at(0.0)
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left - 6 << "\" y=\"" << y_at(hi) + 4 << "\" text-anchor=\"end\">" << format_number(hi)
    << "</text>\n";
  s << "<text x=\"" << left - 6 << "\" y=\"" << y_at(lo) + 4 << "\" text-anchor=\"end\">" << format_number(lo)
    << "</text>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < n; ++i) s << (i ? " " : "") << x_at(i) << "," << y_at(values[i]);
  s << "\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    s << "<circle cx=\"" << x_at(i) << "\" cy=\"" << y_at(values[i]) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    const double lx = x_at(i);
    const double ly = top + plot_h + 14;
    s << "<text x=\"" << lx << "\" y=\"" << ly << "\" text-anchor=\"end\" transform=\"rotate(-45 " << lx << " " << ly
      << ")\">" << xml_escape(i < labels.size() ? labels[i] : std::to_string(i + 1)) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline std::string svg_chart(const GoalSignal& s, const std::string& title) {
  return svg_chart(s.parameter_order, s.values, title);
}

}  // namespace grpanon::report

#endif  // GRPANON_REPORT_HPP
