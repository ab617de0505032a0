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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support/oracles.hpp"
#include "walkbench/errors.hpp"
#include "walkbench/measure.hpp"
#include "walkbench/radial.hpp"

namespace walkbench {
namespace {

ScaledMeasure lazy_f2(const Group& F) {
  std::istringstream in("e 1/5\na 1/5\nA 1/5\nb 1/5\nB 1/5\n");
  return parse_measure(F, in);
}

TEST(TreeCount, SmallCases) {
  EXPECT_EQ(tree_sphere_count(3, 0, 3, 4), 1.0);
  EXPECT_EQ(tree_sphere_count(1, 1, 0, 4), 1.0);
  EXPECT_EQ(tree_sphere_count(1, 1, 2, 4), 3.0);
  EXPECT_EQ(tree_sphere_count(2, 1, 2, 4), 0.0);  // parity
  EXPECT_EQ(tree_sphere_count(1, 4, 1, 4), 0.0);  // triangle
}

TEST(TreeCount, MatchesEnumeration) {
  for (int n = 0; n <= 3; ++n) {
    for (int k = 0; k <= 4; ++k) {
      for (int l = 0; l <= n + k; ++l) {
        EXPECT_EQ(tree_sphere_count(n, k, l, 4),
                  static_cast<double>(testing::tree_count_bruteforce(2, n, k, l)))
            << "n=" << n << " k=" << k << " l=" << l;
      }
    }
  }
}

TEST(TreeCount, SphereSizes) {
  for (int k = 1; k <= 5; ++k) {
    long brute = 0;
    for (const auto& w : testing::free_ball_bruteforce(2, k)) brute += (static_cast<int>(w.size()) == k);
    EXPECT_EQ(tree_sphere_count(0, k, k, 4), static_cast<double>(brute));
    EXPECT_EQ(tree_sphere_size(k, 4), 4.0 * std::pow(3.0, k - 1));
  }
  EXPECT_EQ(tree_sphere_size(0, 4), 1.0);
}

TEST(Radial, ReduceLazyWalk) {
  Group F(GroupDescriptor::free_group(2));
  auto f = radial_reduce(F, lazy_f2(F));
  EXPECT_EQ(f.q, 4);
  EXPECT_NEAR(f.value(0), 0.2, 1e-16);
  EXPECT_NEAR(f.value(1), 0.2, 1e-16);
}

TEST(Radial, ReduceRejectsAnisotropic) {
  Group F(GroupDescriptor::free_group(2));
  std::istringstream in("e 1/5\na 2/5\nA 1/5\nb 1/10\nB 1/10\n");
  EXPECT_THROW(radial_reduce(F, parse_measure(F, in)), InvalidArgument);
}

TEST(Radial, DeltaIsUnit) {
  Group F(GroupDescriptor::free_group(2));
  auto f = radial_reduce(F, lazy_f2(F));
  auto g = radial_convolve(RadialMeasure::delta(4), f);
  ASSERT_EQ(g.radius(), f.radius());
  for (int d = 0; d <= f.radius(); ++d) EXPECT_NEAR(g.value(d), f.value(d), 1e-16);
}

TEST(Radial, AgreesWithBruteForceConvolution) {
  Group F(GroupDescriptor::free_group(2));
  auto mu = lazy_f2(F);
  auto step = testing::plain(mu);
  auto f = radial_reduce(F, mu);
  auto cur = RadialMeasure::delta(4);
  testing::Dist brute{{F.identity(), 1.0}};
  for (int m = 1; m <= 8; ++m) {
    cur = radial_convolve(cur, f);
    brute = testing::brute_convolve(F, brute, step);
    double worst = 0.0;
    for (const auto& [g, v] : brute) {
      worst = std::max(worst, std::abs(cur.value(static_cast<int>(free_length(g))) - v));
    }
    EXPECT_LE(worst, 1e-12) << "m=" << m;
    auto expanded = radial_expand(F, cur);
    EXPECT_EQ(expanded.support.size(), brute.size()) << "m=" << m;
  }
}

}  // namespace
}  // namespace walkbench
