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

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace walkbench {

using Json = nlohmann::ordered_json;

struct Residual {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Uniform result record for every check. Serialises as
/// {name, inputs, residuals[], verdict, tolerances, provenance}.
struct DiagnosticsReport {
  std::string name;
  Json inputs = Json::object();
  std::vector<Residual> residuals;
  std::string verdict;
  Json tolerances = Json::object();
  Json provenance = Json::object();
  Json details = Json::object();

  /// Adds a residual that passes when value <= tolerance (NaN fails).
  Residual& add(const std::string& label, double value, double tolerance);
  /// Adds a residual with an externally decided outcome.
  Residual& add_flag(const std::string& label, double value, double tolerance, bool pass);

  bool passed() const;
  double worst_ratio() const;  // max value / tolerance
  /// Sets verdict to pass_text or fail_text from passed().
  void conclude(const std::string& pass_text = "pass", const std::string& fail_text = "fail");

  Json to_json() const;
  std::string to_csv() const;
};

/// Doubles rendered with 17 significant digits; stable across runs.
std::string format_double(double v);

}  // namespace walkbench
