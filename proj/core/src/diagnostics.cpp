// Copyright 2026 The walkbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "walkbench/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace walkbench {

Residual& DiagnosticsReport::add(const std::string& label, double value, double tolerance) {
  return add_flag(label, value, tolerance, !std::isnan(value) && value <= tolerance);
}

Residual& DiagnosticsReport::add_flag(const std::string& label, double value, double tolerance,
                                      bool pass) {
  residuals.push_back({label, value, tolerance, pass});
  return residuals.back();
}

bool DiagnosticsReport::passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.pass; });
}

double DiagnosticsReport::worst_ratio() const {
  double w = 0.0;
  for (const auto& r : residuals) {
    if (r.tolerance > 0) w = std::max(w, r.value / r.tolerance);
  }
  return w;
}

void DiagnosticsReport::conclude(const std::string& pass_text, const std::string& fail_text) {
  verdict = passed() ? pass_text : fail_text;
}

namespace {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

Json DiagnosticsReport::to_json() const {
  Json j;
  j["name"] = name;
  j["inputs"] = inputs;
  Json rs = Json::array();
  for (const auto& r : residuals) {
    rs.push_back({{"label", r.label},
                  {"value", number(r.value)},
                  {"tolerance", number(r.tolerance)},
                  {"pass", r.pass}});
  }
  j["residuals"] = std::move(rs);
  j["verdict"] = verdict;
  j["tolerances"] = tolerances;
  j["provenance"] = provenance;
  if (!details.empty()) j["details"] = details;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string DiagnosticsReport::to_csv() const {
  std::ostringstream os;
  os << "report,label,value,tolerance,pass\n";
  for (const auto& r : residuals) {
    os << name << ',' << '"' << r.label << '"' << ',' << format_double(r.value) << ','
       << format_double(r.tolerance) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace walkbench
