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

// Small seeded generators for property tests. A failing case prints the
// seed and trial so it can be replayed.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "walkbench/group.hpp"
#include "walkbench/measure.hpp"

namespace walkbench::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  /// Random product of up to max_len generators.
  GroupElement element(const Group& G, int max_len) {
    auto g = G.identity();
    const int len = uniform(0, max_len);
    for (int i = 0; i < len; ++i) g = G.multiply(g, pick(G.generators()));
    return g;
  }

  /// Random probability vector on e plus the generators, every weight
  /// positive so the walk is aperiodic and generating.
  ScaledMeasure measure(const Group& G) {
    std::vector<std::pair<GroupElement, double>> entries;
    double total = 0.0;
    entries.emplace_back(G.identity(), real(0.1, 1.0));
    for (const auto& s : G.generators()) entries.emplace_back(s, real(0.1, 1.0));
    for (auto& [g, w] : entries) total += w;
    for (auto& [g, w] : entries) w /= total;
    return ScaledMeasure::from_probabilities(entries);
  }

 private:
  std::mt19937_64 rng_;
};

/// Runs `trials` cases; the body returns an empty string on success or a
/// description of the counterexample.
inline std::string for_all(std::uint64_t seed, int trials,
                           const std::function<std::string(Gen&, int)>& body) {
  Gen gen(seed);
  for (int t = 0; t < trials; ++t) {
    auto msg = body(gen, t);
    if (!msg.empty()) {
      std::ostringstream os;
      os << "seed " << seed << " trial " << t << ": " << msg;
      return os.str();
    }
  }
  return {};
}

}  // namespace walkbench::testing
