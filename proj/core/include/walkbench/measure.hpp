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

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "walkbench/group.hpp"

namespace walkbench {

/// Finitely supported measure stored as mantissas times one common factor
/// exp(log_scale). Zero entries are never stored.
struct ScaledMeasure {
  std::map<GroupElement, double> support;
  double log_scale = 0.0;
  int step_index = 0;

  static ScaledMeasure point_mass(const Group& g);
  static ScaledMeasure from_probabilities(
      const std::vector<std::pair<GroupElement, double>>& entries);

  bool contains(const GroupElement& g) const { return support.count(g) != 0; }
  double value(const GroupElement& g) const;
  double log_value(const GroupElement& g) const;  // -inf when absent
  double total_mass() const;
  /// Rescale so the largest mantissa is 1.
  void normalize();
};

/// (mu * nu)(w) = sum_u mu(u) nu(u^-1 w). Throws BudgetExceeded when the
/// product support would exceed support_budget.
ScaledMeasure convolve(const Group& g, const ScaledMeasure& mu, const ScaledMeasure& nu,
                       std::size_t support_budget = 50'000'000);

struct MeasureReport {
  double mass = 0.0;
  bool symmetric = false;
  /// gcd of the observed return times; 0 when no return was seen.
  int period = 0;
  int period_probe_depth = 0;
  /// "generates", "fails" or "inconclusive".
  std::string generation;
  int generation_radius = 0;
};

/// Throws InvalidArgument on a negative entry or when the mass differs
/// from 1 by more than 1e-12.
MeasureReport validate_measure(const Group& g, const ScaledMeasure& mu, int r_check = 2,
                               int probe_depth = 16, std::size_t budget = 200'000);

/// Reads "<element> <probability>" lines. Probabilities may be decimals or
/// exact rationals such as 1/4; '#' starts a comment.
ScaledMeasure parse_measure(const Group& g, std::istream& in);
ScaledMeasure load_measure(const Group& g, const std::string& path);
std::string format_measure(const Group& g, const ScaledMeasure& mu);

/// Parses "p/q" or a decimal.
double parse_probability(const std::string& text);

}  // namespace walkbench
