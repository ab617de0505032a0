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

#include <vector>

#include "walkbench/group.hpp"
#include "walkbench/measure.hpp"

namespace walkbench {

/// Isotropic function on the free group: w -> values[|w|] * exp(log_scale).
/// values holds the per-element value, not the sphere mass.
struct RadialMeasure {
  std::vector<double> values;
  double log_scale = 0.0;
  int q = 4;  // tree degree 2s
  int step_index = 0;

  static RadialMeasure delta(int q);
  int radius() const { return static_cast<int>(values.size()) - 1; }
  double value(int d) const;
  void normalize();
};

/// Number of vertices u of the q-regular tree with |u| = k and d(u, w) = l,
/// for any fixed w with |w| = n. Exact as a double up to 2^53.
double tree_sphere_count(int n, int k, int l, int q);

/// Size of the sphere of radius k in the q-regular tree.
double tree_sphere_size(int k, int q);

/// Throws InvalidArgument unless mu is constant on every sphere it meets.
RadialMeasure radial_reduce(const Group& g, const ScaledMeasure& mu);

/// (f * g)(n) = sum_{k,l} f(k) g(l) M(n,k,l). Cost is O(|f| * |g|^2).
RadialMeasure radial_convolve(const RadialMeasure& f, const RadialMeasure& g);

/// Expands back to an element-wise measure on the ball of radius f.radius().
ScaledMeasure radial_expand(const Group& g, const RadialMeasure& f);

}  // namespace walkbench
