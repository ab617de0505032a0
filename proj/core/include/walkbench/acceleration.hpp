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

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace walkbench {

enum class Accelerator {
  kRichardson,  // polynomial extrapolation of log a_m in 1/m
  kAitken,      // Aitken delta-squared on the last three terms
  kNone,        // raw last term
};

const char* accelerator_name(Accelerator a);
Accelerator parse_accelerator(const std::string& name);

/// Value at x = 0 of the interpolating polynomial through (xs, ys).
double neville_at_zero(std::span<const double> xs, std::span<const double> ys);

/// a2 - (a2 - a1)^2 / (a2 - 2 a1 + a0); returns a2 when the denominator is 0.
double aitken_delta2(double a0, double a1, double a2);

struct AccelerationOptions {
  Accelerator method = Accelerator::kRichardson;
  int order = 2;
  /// Node spacing h = M / spacing_divisor.
  int spacing_divisor = 8;
  /// Number of shifted end points whose estimates form the interval.
  int window = 5;
  /// Raw terms kept for auditing and for the oscillation measure.
  int raw_tail_length = 16;
  /// Only every stride-th index is used (period subsequences).
  int stride = 1;
};

struct TailEstimate {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int m0 = 0;  // first index touched
  int M = 0;
  bool accelerated = false;
  Accelerator method = Accelerator::kNone;
  double raw = 0.0;
  /// max - min of the retained raw tail.
  double raw_oscillation = 0.0;
  std::vector<std::pair<int, double>> raw_tail;
  std::vector<std::pair<int, double>> accelerated_tail;

  double uncertainty() const;
};

/// Estimates lim a_m from log a_m given for m in [m_min, M]. log_seq must be
/// finite on that range. A sequence that is exactly constant on all nodes
/// is returned exactly.
TailEstimate accelerate_log_tail(const std::function<double(int)>& log_seq, int m_min, int M,
                                 const AccelerationOptions& opts = {});

}  // namespace walkbench
