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

#include "walkbench/radial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "walkbench/errors.hpp"

namespace walkbench {

RadialMeasure RadialMeasure::delta(int q) {
  RadialMeasure f;
  f.q = q;
  f.values = {1.0};
  return f;
}

double RadialMeasure::value(int d) const {
  if (d < 0 || d > radius()) return 0.0;
  return values[d] * std::exp(log_scale);
}

void RadialMeasure::normalize() {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, v);
  if (mx <= 0.0) return;
  for (double& v : values) v /= mx;
  log_scale += std::log(mx);
}

double tree_sphere_count(int n, int k, int l, int q) {
  if (n < 0 || k < 0 || l < 0) return 0.0;
  if (l < std::abs(n - k) || l > n + k || (n + k + l) % 2 != 0) return 0.0;
  // u leaves the geodesic [e, w] at distance j from e and walks t more steps.
  const int j = (k - l + n) / 2;
  const int t = (k + l - n) / 2;
  if (t == 0) return 1.0;
  double branches;
  if (n == 0) {
    branches = q;
  } else if (j == 0 || j == n) {
    branches = q - 1;
  } else {
    branches = q - 2;
  }
  return branches * std::pow(static_cast<double>(q - 1), t - 1);
}

double tree_sphere_size(int k, int q) { return tree_sphere_count(0, k, k, q); }

RadialMeasure radial_reduce(const Group& g, const ScaledMeasure& mu) {
  if (g.descriptor().family() != Family::kFree) {
    throw DescriptorMismatch("radial reduction needs a free group");
  }
  const int q = 2 * g.descriptor().rank();
  std::map<int, std::pair<double, int>> by_radius;  // first value seen, count
  for (const auto& [w, a] : mu.support) {
    int d = static_cast<int>(free_length(w));
    auto [it, fresh] = by_radius.emplace(d, std::make_pair(a, 0));
    if (!fresh && std::abs(it->second.first - a) > 1e-13 * std::max(1.0, a)) {
      throw InvalidArgument("measure is not isotropic at radius " + std::to_string(d));
    }
    ++it->second.second;
  }
  RadialMeasure f;
  f.q = q;
  f.log_scale = mu.log_scale;
  f.step_index = mu.step_index;
  int r = by_radius.empty() ? 0 : by_radius.rbegin()->first;
  f.values.assign(r + 1, 0.0);
  for (const auto& [d, entry] : by_radius) {
    if (entry.second != static_cast<int>(tree_sphere_size(d, q))) {
      throw InvalidArgument("measure is not isotropic: sphere " + std::to_string(d) +
                           " only partly charged");
    }
    f.values[d] = entry.first;
  }
  return f;
}

RadialMeasure radial_convolve(const RadialMeasure& f, const RadialMeasure& g) {
  if (f.q != g.q) throw DescriptorMismatch("radial measures on different trees");
  const int q = f.q;
  const int kf = f.radius();
  const int lg = g.radius();
  RadialMeasure out;
  out.q = q;
  out.log_scale = f.log_scale + g.log_scale;
  out.step_index = f.step_index + g.step_index;
  out.values.assign(kf + lg + 1, 0.0);
  // Loop over the shorter support innermost in both k and l directions.
  for (int n = 0; n <= kf + lg; ++n) {
    double s = 0.0;
    for (int l = 0; l <= lg; ++l) {
      if (g.values[l] == 0.0) continue;
      int lo = std::abs(n - l);
      int hi = std::min(n + l, kf);
      for (int k = lo; k <= hi; k += 2) {
        if (f.values[k] == 0.0) continue;
        s += f.values[k] * g.values[l] * tree_sphere_count(n, k, l, q);
      }
    }
    out.values[n] = s;
  }
  while (out.values.size() > 1 && out.values.back() == 0.0) out.values.pop_back();
  out.normalize();
  return out;
}

ScaledMeasure radial_expand(const Group& g, const RadialMeasure& f) {
  ScaledMeasure m;
  m.log_scale = f.log_scale;
  m.step_index = f.step_index;
  for (const auto& w : g.ball(f.radius())) {
    double v = f.values[free_length(w)];
    if (v > 0.0) m.support.emplace(w, v);
  }
  return m;
}

}  // namespace walkbench
