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

// Property checks shared by the gtest suites and the acceptance runner.
// Each returns the worst observed value against its bound plus the first
// counterexample, if any.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "walkbench/powers.hpp"
#include "walkbench/radial.hpp"
#include "walkbench/ratio_limit.hpp"
#include "walkbench/spectral.hpp"

namespace walkbench::testing {

struct PropertyResult {
  bool ok = true;
  double worst = -INFINITY;  // largest excess over the allowed bound, <= 0 when ok
  int cases = 0;
  std::string counterexample;

  void observe(double excess, const std::string& what) {
    ++cases;
    worst = std::max(worst, excess);
    if (excess > 0.0 && ok) {
      ok = false;
      counterexample = what;
    }
  }
};

using MetricFn = std::function<double(const GroupElement&, const GroupElement&)>;

/// d(p,p) = 0, symmetry and the triangle inequality on random triples,
/// all exact.
inline PropertyResult metric_axioms(const Group& G, const std::vector<GroupElement>& points,
                                    const MetricFn& d, std::uint64_t seed, int trials) {
  PropertyResult r;
  Gen gen(seed);
  for (int t = 0; t < trials; ++t) {
    const auto& a = gen.pick(points);
    const auto& b = gen.pick(points);
    const auto& c = gen.pick(points);
    const double ab = d(a, b), ba = d(b, a), bc = d(b, c), ac = d(a, c);
    const std::string tag = G.format(a) + "," + G.format(b) + "," + G.format(c);
    r.observe(std::abs(d(a, a)), "d(p,p) at " + tag);
    r.observe(std::abs(ab - ba), "symmetry at " + tag);
    r.observe(ac - ab - bc, "triangle at " + tag);
    r.observe(-ab, "negative at " + tag);
  }
  return r;
}

/// Cocycle residual against `factor` times its propagated uncertainty.
inline PropertyResult cocycle_property(const KernelSource& H, const std::vector<GroupElement>& gs,
                                       const std::vector<GroupElement>& xs,
                                       const std::vector<GroupElement>& ys, double factor,
                                       std::uint64_t seed, int trials, double floor = 1e-12) {
  PropertyResult r;
  Gen gen(seed);
  const auto& G = H.group();
  for (int t = 0; t < trials; ++t) {
    const auto& g = gen.pick(gs);
    const auto& x = gen.pick(xs);
    const auto& y = gen.pick(ys);
    auto c = cocycle_check(H, g, x, y);
    r.observe(c.residual - factor * c.uncertainty - floor,
              "g=" + G.format(g) + " x=" + G.format(x) + " y=" + G.format(y));
  }
  return r;
}

inline PropertyResult harmonicity_property(const KernelSource& H, const PowersCache& cache,
                                           const SpectralEstimate& rho,
                                           const std::vector<GroupElement>& xs,
                                           const std::vector<GroupElement>& ys,
                                           double extra = 1e-12) {
  PropertyResult r;
  const auto& G = H.group();
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      auto c = rho_harmonicity_check(H, cache, rho, x, y);
      r.observe(c.residual - c.uncertainty - extra, "x=" + G.format(x) + " y=" + G.format(y));
    }
  }
  return r;
}

/// c_x <= r_m <= C_x for the last `tail` terms of every ratio sequence.
inline PropertyResult containment_property(const PowersCache& cache, double rho,
                                           const std::vector<GroupElement>& xs,
                                           const std::vector<GroupElement>& ys, int tail) {
  PropertyResult r;
  const auto& G = cache.group();
  for (const auto& x : xs) {
    const auto b = bound_constants(cache, rho, x);
    for (const auto& y : ys) {
      auto s = ratio_sequence(cache, x, y);
      const std::size_t n = s.values.size();
      for (std::size_t i = n > static_cast<std::size_t>(tail) ? n - tail : 0; i < n; ++i) {
        const double v = s.values[i];
        const std::string tag = "x=" + G.format(x) + " y=" + G.format(y) + " m=" +
                                std::to_string(s.ms[i]);
        r.observe(b.c - v, "below c_x at " + tag);
        r.observe(v - b.C, "above C_x at " + tag);
      }
    }
  }
  return r;
}

/// Radial engine against brute-force element-wise convolution for random
/// isotropic weights on F_2, m <= max_m.
inline PropertyResult radial_oracle_property(std::uint64_t seed, int trials, int max_m,
                                             double tol = 1e-12) {
  PropertyResult r;
  Gen gen(seed);
  auto F = std::make_shared<const Group>(GroupDescriptor::free_group(2));
  for (int t = 0; t < trials; ++t) {
    const double p0 = gen.real(0.0, 0.6);
    const double p1 = (1.0 - p0) / 4.0;
    std::vector<std::pair<GroupElement, double>> entries{{F->identity(), p0}};
    for (const auto& s : F->generators()) entries.emplace_back(s, p1);
    if (p0 == 0.0) entries.erase(entries.begin());
    auto mu = ScaledMeasure::from_probabilities(entries);
    auto cache = build_powers(F, mu, max_m, EngineChoice::kRadial);
    Dist brute{{F->identity(), 1.0}};
    const auto step = plain(mu);
    for (int m = 1; m <= max_m; ++m) {
      brute = brute_convolve(*F, brute, step);
      for (const auto& [w, v] : brute) {
        std::ostringstream os;
        os << "p0=" << p0 << " m=" << m << " w=" << F->format(w);
        r.observe(std::abs(cache->value(m, w) - v) - tol, os.str());
      }
    }
  }
  return r;
}

}  // namespace walkbench::testing
