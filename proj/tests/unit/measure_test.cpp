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

#include <sstream>

#include "support/oracles.hpp"
#include "walkbench/errors.hpp"
#include "walkbench/measure.hpp"

namespace walkbench {
namespace {

ScaledMeasure read(const Group& G, const std::string& text) {
  std::istringstream in(text);
  return parse_measure(G, in);
}

TEST(Measure, LazyZIsValidSymmetricAperiodic) {
  Group Z(GroupDescriptor::lattice(1));
  auto mu = read(Z, "0 1/2\n1 1/4\n-1 1/4\n");
  auto r = validate_measure(Z, mu);
  EXPECT_NEAR(r.mass, 1.0, 1e-15);
  EXPECT_TRUE(r.symmetric);
  EXPECT_EQ(r.period, 1);
  EXPECT_EQ(r.generation, "generates");
}

TEST(Measure, SimpleWalkOnZHasPeriodTwo) {
  Group Z(GroupDescriptor::lattice(1));
  auto r = validate_measure(Z, read(Z, "1 0.5\n-1 0.5\n"));
  EXPECT_TRUE(r.symmetric);
  EXPECT_EQ(r.period, 2);
}

TEST(Measure, PointMassDoesNotGenerate) {
  Group Z(GroupDescriptor::lattice(1));
  auto r = validate_measure(Z, ScaledMeasure::point_mass(Z));
  EXPECT_EQ(r.generation, "fails");
}

TEST(Measure, OneSidedWalkIsNotSymmetric) {
  Group Z(GroupDescriptor::lattice(1));
  auto r = validate_measure(Z, read(Z, "0 1/2\n1 1/2\n"));
  EXPECT_FALSE(r.symmetric);
  // Only the positive half-line is reached, so the ball is not covered.
  EXPECT_NE(r.generation, "generates");
}

TEST(Measure, RejectsBadMass) {
  Group Z(GroupDescriptor::lattice(1));
  EXPECT_THROW(validate_measure(Z, read(Z, "0 1/2\n1 1/4\n")), InvalidArgument);
  EXPECT_THROW(read(Z, "0 -1/2\n1 3/2\n"), Error);
}

TEST(Measure, ParseProbability) {
  EXPECT_DOUBLE_EQ(parse_probability("1/4"), 0.25);
  EXPECT_DOUBLE_EQ(parse_probability("0.125"), 0.125);
  EXPECT_DOUBLE_EQ(parse_probability("7/20"), 0.35);
  EXPECT_THROW(parse_probability("1/0"), Error);
  EXPECT_THROW(parse_probability("x"), Error);
}

TEST(Measure, CommentsAndFormatRoundTrip) {
  Group F(GroupDescriptor::free_group(2));
  auto mu = read(F, "# comment\ne 1/5\na 1/5 # trailing\nA 1/5\nb 1/5\nB 1/5\n");
  EXPECT_EQ(mu.support.size(), 5u);
  auto again = read(F, format_measure(F, mu));
  ASSERT_EQ(again.support.size(), mu.support.size());
  for (const auto& [g, v] : mu.support) EXPECT_DOUBLE_EQ(again.value(g), mu.value(g));
}

TEST(Measure, DeltaIsConvolutionUnit) {
  Group Z(GroupDescriptor::lattice(1));
  auto mu = read(Z, "0 1/2\n1 1/4\n-1 1/4\n");
  auto d = ScaledMeasure::point_mass(Z);
  for (const auto& nu : {convolve(Z, d, mu), convolve(Z, mu, d)}) {
    ASSERT_EQ(nu.support.size(), 3u);
    for (const auto& [g, v] : mu.support) EXPECT_NEAR(nu.value(g), mu.value(g), 1e-16);
  }
}

TEST(Measure, LazyZTwoSteps) {
  Group Z(GroupDescriptor::lattice(1));
  auto mu = read(Z, "0 1/2\n1 1/4\n-1 1/4\n");
  auto mu2 = convolve(Z, mu, mu);
  // Paths 0,0,0 and 0,1,0 and 0,-1,0.
  const double oracle = 0.5 * 0.5 + 2 * 0.25 * 0.25;
  EXPECT_NEAR(mu2.value(Z.identity()), oracle, 1e-16);
  EXPECT_NEAR(oracle, 3.0 / 8.0, 0.0);
  EXPECT_NEAR(mu2.value(Z.parse("2")), 1.0 / 16.0, 1e-16);
}

TEST(Measure, UniformFreeTwoSteps) {
  Group F(GroupDescriptor::free_group(2));
  auto mu = read(F, "a 1/4\nA 1/4\nb 1/4\nB 1/4\n");
  auto mu2 = convolve(F, mu, mu);
  auto brute = testing::brute_convolve(F, testing::plain(mu), testing::plain(mu));
  EXPECT_NEAR(brute[F.identity()], 4.0 / 16.0, 1e-16);
  EXPECT_NEAR(mu2.value(F.identity()), 0.25, 1e-16);
  EXPECT_EQ(mu2.support.size(), brute.size());
  for (const auto& [g, v] : brute) EXPECT_NEAR(mu2.value(g), v, 1e-16);
}

TEST(Measure, ConvolveBudget) {
  Group Z2(GroupDescriptor::lattice(2));
  auto mu = read(Z2, "e 1/2\n(1,0) 1/8\n(-1,0) 1/8\n(0,1) 1/8\n(0,-1) 1/8\n");
  EXPECT_THROW(convolve(Z2, mu, mu, 5), BudgetExceeded);
}

TEST(Measure, NormalizeKeepsValues) {
  Group Z(GroupDescriptor::lattice(1));
  auto mu = read(Z, "0 1/2\n1 1/4\n-1 1/4\n");
  const double before = mu.value(Z.parse("1"));
  mu.normalize();
  double mx = 0.0;
  for (const auto& [g, v] : mu.support) mx = std::max(mx, v);
  EXPECT_DOUBLE_EQ(mx, 1.0);
  EXPECT_NEAR(mu.value(Z.parse("1")), before, 1e-16);
  EXPECT_NEAR(mu.total_mass(), 1.0, 1e-15);
}

TEST(Measure, DescriptorMismatchInMeasureFile) {
  Group Z(GroupDescriptor::lattice(1));
  EXPECT_THROW(read(Z, "(1,0) 1\n"), Error);
}

}  // namespace
}  // namespace walkbench
