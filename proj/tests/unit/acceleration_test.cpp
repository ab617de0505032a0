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
#include <vector>

#include "walkbench/acceleration.hpp"
#include "walkbench/errors.hpp"

namespace walkbench {
namespace {

TEST(Acceleration, NevilleRecoversPolynomial) {
  // p(x) = 3 - 2x + 5x^2 through three nodes.
  std::vector<double> xs{0.1, 0.2, 0.4};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3 - 2 * x + 5 * x * x);
  EXPECT_NEAR(neville_at_zero(xs, ys), 3.0, 1e-13);
}

TEST(Acceleration, AitkenIsExactOnGeometricTails) {
  // Partial sums of sum 2^-k converge to 2 with geometric error.
  EXPECT_NEAR(aitken_delta2(1.5, 1.75, 1.875), 2.0, 1e-15);
  EXPECT_EQ(aitken_delta2(1.0, 1.0, 1.0), 1.0);
}

TEST(Acceleration, ConstantSequenceIsExact) {
  auto t = accelerate_log_tail([](int) { return std::log(1.25); }, 1, 200);
  EXPECT_EQ(t.estimate, 1.25);
  EXPECT_EQ(t.lo, 1.25);
  EXPECT_EQ(t.hi, 1.25);
}

TEST(Acceleration, RemovesOneOverMCorrections) {
  auto f = [](int m) { return std::log(2.0 * (1.0 + 1.0 / m + 0.5 / (double(m) * m))); };
  for (auto method : {Accelerator::kRichardson, Accelerator::kAitken}) {
    AccelerationOptions o;
    o.method = method;
    auto t = accelerate_log_tail(f, 1, 400, o);
    // Aitken is slower on logarithmic convergence.
    EXPECT_NEAR(t.estimate, 2.0, method == Accelerator::kRichardson ? 2e-3 : 5e-3)
        << accelerator_name(method);
    EXPECT_LT(std::abs(t.estimate - 2.0), std::abs(t.raw - 2.0)) << accelerator_name(method);
    EXPECT_LE(t.lo, t.estimate);
    EXPECT_LE(t.estimate, t.hi);
    EXPECT_TRUE(t.accelerated);
  }
  AccelerationOptions none;
  none.method = Accelerator::kNone;
  auto t = accelerate_log_tail(f, 1, 400, none);
  EXPECT_NEAR(t.estimate, std::exp(f(400)), 1e-15);
  EXPECT_FALSE(t.accelerated);
}

TEST(Acceleration, RawTailIsRetained) {
  auto f = [](int m) { return std::log(1.0 + 1.0 / m); };
  AccelerationOptions o;
  o.raw_tail_length = 10;
  auto t = accelerate_log_tail(f, 1, 100, o);
  ASSERT_EQ(t.raw_tail.size(), 10u);
  EXPECT_EQ(t.raw_tail.back().first, 100);
  EXPECT_NEAR(t.raw_oscillation, (1.0 + 1.0 / 91) - (1.0 + 1.0 / 100), 1e-14);
}

TEST(Acceleration, NamesRoundTrip) {
  for (auto a : {Accelerator::kRichardson, Accelerator::kAitken, Accelerator::kNone}) {
    EXPECT_EQ(parse_accelerator(accelerator_name(a)), a);
  }
  EXPECT_THROW(parse_accelerator("magic"), Error);
}

}  // namespace
}  // namespace walkbench
