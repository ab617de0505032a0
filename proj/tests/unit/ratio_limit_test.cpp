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
#include "walkbench/ratio_limit.hpp"

namespace walkbench {
namespace {

std::shared_ptr<const PowersCache> make(GroupDescriptor d, const std::string& text, int M) {
  auto G = std::make_shared<const Group>(std::move(d));
  std::istringstream in(text);
  return build_powers(G, parse_measure(*G, in), M);
}

std::shared_ptr<const PowersCache> lazy_z() {
  static auto c = make(GroupDescriptor::lattice(1), "0 1/2\n1 1/4\n-1 1/4\n", 256);
  return c;
}
std::shared_ptr<const PowersCache> lazy_z2() {
  static auto c = make(GroupDescriptor::lattice(2),
                       "e 1/2\n(1,0) 1/8\n(-1,0) 1/8\n(0,1) 1/8\n(0,-1) 1/8\n", 256);
  return c;
}
std::shared_ptr<const PowersCache> lazy_f2() {
  static auto c = make(GroupDescriptor::free_group(2), "e 1/5\na 1/5\nA 1/5\nb 1/5\nB 1/5\n", 2000);
  return c;
}

double exact_f2_rho() { return 0.2 + 0.8 * std::sqrt(3.0) / 2.0; }

TEST(RatioSequence, IdentityRowIsConstant) {
  auto c = lazy_z();
  const auto& Z = c->group();
  auto s = ratio_sequence(*c, Z.identity(), Z.parse("3"));
  ASSERT_FALSE(s.values.empty());
  for (double v : s.values) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(s.first_full, 3);
}

TEST(RatioSequence, LazyZExactValues) {
  auto c = lazy_z();
  const auto& Z = c->group();
  auto s = ratio_sequence(*c, Z.parse("1"), Z.identity());
  // mu^m(-1) / mu^m(0) = C(2m, m+1) / C(2m, m) = m / (m + 1).
  for (std::size_t i = 0; i < s.ms.size(); ++i) {
    const int m = s.ms[i];
    const double oracle = testing::lazy_z_exact(m, 1) / testing::lazy_z_exact(m, 0);
    EXPECT_NEAR(s.values[i], oracle, 1e-12);
    EXPECT_NEAR(oracle, m / (m + 1.0), 1e-12);
  }
  for (std::size_t i = 1; i < s.ms.size(); ++i) EXPECT_GT(s.values[i], s.values[i - 1]);
  EXPECT_GT(s.values.back(), 0.99);
}

TEST(RatioSequence, PeriodicWalkIsRejected) {
  auto c = make(GroupDescriptor::lattice(1), "1 1/2\n-1 1/2\n", 40);
  const auto& Z = c->group();
  EXPECT_THROW(ratio_sequence(*c, Z.parse("1"), Z.identity()), AperiodicityRequired);
  EXPECT_THROW(srlp_diagnostic(*c, 2, 0.02), AperiodicityRequired);
}

TEST(RatioSequence, UnreachedTargetIsCoverageGap) {
  auto c = lazy_z();
  const auto& Z = c->group();
  EXPECT_THROW(ratio_sequence(*c, Z.identity(), Z.parse("300")), CoverageGap);
}

TEST(RatioSequence, FreeTailWithinBoundConstants) {
  auto c = lazy_f2();
  const auto& F = c->group();
  auto a = F.parse("a");
  auto b = bound_constants(*c, spectral_radius(*c).rho_hat, a);
  auto s = ratio_sequence(*c, a, F.identity());
  for (std::size_t i = s.values.size() - 100; i < s.values.size(); ++i) {
    EXPECT_GE(s.values[i], b.c);
    EXPECT_LE(s.values[i], b.C);
  }
}

TEST(BoundConstants, IdentityAndLazyZ) {
  auto c = lazy_z();
  const auto& Z = c->group();
  auto e = bound_constants(*c, 1.0, Z.identity());
  EXPECT_EQ(e.C, 1.0);
  EXPECT_EQ(e.c, 1.0);
  EXPECT_EQ(e.n, 0);
  EXPECT_EQ(e.n_prime, 0);
  const double rho = spectral_radius(*c).rho_hat;
  auto one = bound_constants(*c, rho, Z.parse("1"));
  EXPECT_EQ(one.n, 1);
  EXPECT_NEAR(one.C, rho / 0.25, 1e-12);
  EXPECT_NEAR(one.C, 4.0, 0.1);
  EXPECT_LE(one.c, one.C);
  EXPECT_THROW(bound_constants(*c, rho, Z.parse("999")), CoverageGap);
}

TEST(ClosedForm, PrintedValues) {
  Group F(GroupDescriptor::free_group(2));
  for (const auto& y : F.ball(2)) EXPECT_EQ(closed_form_H_free_isotropic(F, F.identity(), y), 1.0);
  EXPECT_NEAR(closed_form_H_free_isotropic(F, F.parse("a"), F.parse("a")), 2.0 / std::sqrt(3.0),
              1e-15);
  EXPECT_NEAR(closed_form_H_free_isotropic(F, F.parse("a"), F.parse("a")), 1.1547, 1e-4);
  EXPECT_NEAR(closed_form_H_free_isotropic(F, F.parse("a"), F.parse("a*b")), 1.2990, 1e-4);
  for (int dxy = 0; dxy < 5; ++dxy) {
    for (int dey = 0; dey < 5; ++dey) {
      EXPECT_NEAR(closed_form_H_free_isotropic(2, dxy, dey), testing::sawyer(2, dxy, dey), 1e-14);
      EXPECT_NEAR(closed_form_H_free_isotropic(3, dxy, dey), testing::sawyer(3, dxy, dey), 1e-14);
    }
  }
}

TEST(EstimateH, IdentityRowIsExact) {
  auto c = lazy_f2();
  const auto& F = c->group();
  for (const auto& y : F.ball(2)) {
    auto e = estimate_H(*c, F.identity(), y);
    EXPECT_EQ(e.estimate, 1.0);
    EXPECT_EQ(e.lo, 1.0);
    EXPECT_EQ(e.hi, 1.0);
  }
}

TEST(EstimateH, FreeAgreesWithClosedForm) {
  auto c = lazy_f2();
  RatioKernel H(c);
  const auto& F = c->group();
  auto a = F.parse("a");
  EXPECT_NEAR(H(a, a) / (2.0 / std::sqrt(3.0)), 1.0, 0.01);
  for (const auto& x : F.ball(2)) {
    for (const auto& y : F.ball(2)) {
      const double cf = closed_form_H_free_isotropic(F, x, y);
      auto e = H.entry(x, y);
      EXPECT_NEAR(e.estimate / cf, 1.0, 0.01) << F.format(x) << " " << F.format(y);
      EXPECT_LE(e.lo, e.estimate);
      EXPECT_LE(e.estimate, e.hi);
    }
  }
}

TEST(EstimateH, LazyZ2IsOne) {
  RatioKernel H(lazy_z2());
  const auto& G = lazy_z2()->group();
  for (const auto& x : G.ball(3)) {
    for (const auto& y : G.ball(3)) EXPECT_NEAR(H(x, y), 1.0, 0.05);
  }
}

TEST(Srlp, LazyZConsistent) {
  auto r = srlp_diagnostic(*lazy_z(), 3, 0.02);
  EXPECT_TRUE(r.passed()) << r.to_json().dump();
}

TEST(Srlp, FreeConsistent) {
  auto r = srlp_diagnostic(*lazy_f2(), 2, 0.02);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.residuals.empty());
}

TEST(Radical, AmenableIsWholeBall) {
  RatioKernel H(lazy_z2());
  auto r = detect_radical(H, 3, 3);
  EXPECT_EQ(r.flagged.size(), lazy_z2()->group().ball(3).size());
  EXPECT_TRUE(r.closure_ok);
}

TEST(Radical, FreeIsTrivial) {
  RatioKernel H(lazy_f2());
  auto r = detect_radical(H, 2, 2);
  ASSERT_EQ(r.flagged.size(), 1u);
  EXPECT_TRUE(lazy_f2()->group().is_identity(r.flagged.front()));
}

TEST(RatioMetric, Basics) {
  auto c = lazy_f2();
  RatioKernel H(c);
  const auto& F = c->group();
  const double rho = spectral_radius(*c).rho_hat;
  Normalizer C = [&](const GroupElement& x) { return bound_constants(*c, rho, x).C; };
  auto prefix = F.ball(2);
  auto a = F.parse("a");
  auto b = F.parse("b");
  EXPECT_EQ(ratio_metric(H, prefix, a, a, C).value, 0.0);
  auto d = ratio_metric(H, prefix, a, b, C);
  EXPECT_GT(d.value, d.uncertainty);
  EXPECT_NEAR(d.tail_bound, 2.0 * std::pow(2.0, -static_cast<double>(prefix.size())), 1e-18);
}

TEST(RatioMetric, AmenableSingleCoset) {
  auto c = lazy_z();
  RatioKernel H(c);
  const auto& Z = c->group();
  const double rho = spectral_radius(*c).rho_hat;
  Normalizer C = [&](const GroupElement& x) { return bound_constants(*c, rho, x).C; };
  auto prefix = Z.ball(3);
  for (const auto& y : Z.ball(2)) {
    for (const auto& z : Z.ball(2)) {
      auto d = ratio_metric(H, prefix, y, z, C);
      EXPECT_LE(d.value, d.tail_bound + d.uncertainty + 1e-12);
    }
  }
}

TEST(BoundaryTrace, ConstantSequenceConverges) {
  auto G = std::make_shared<const Group>(GroupDescriptor::free_group(2));
  ClosedFormFreeKernel H(G);
  auto y = G->parse("a*b");
  auto r = boundary_trace(H, G->ball(1), {y, y, y}, [](const GroupElement&) { return 1.0; });
  EXPECT_EQ(r.verdict, "converging");
}

TEST(BoundaryTrace, GeodesicRayAndAlternation) {
  auto G = std::make_shared<const Group>(GroupDescriptor::free_group(2));
  ClosedFormFreeKernel H(G);
  Normalizer one = [](const GroupElement&) { return 1.0; };
  std::vector<GroupElement> ray, alt;
  // The exact kernel moves by O(1/k^2) per step along the ray.
  for (int k = 20; k <= 26; ++k) {
    ray.push_back(G->parse("a^" + std::to_string(k)));
    alt.push_back(G->parse((k % 2 ? "b^" : "a^") + std::to_string(k)));
  }
  TraceOptions o;
  o.metric_radius = 2;
  o.tol = 0.01;
  auto r = boundary_trace(H, G->ball(2), ray, one, o);
  EXPECT_EQ(r.verdict, "converging");
  // Along the a-ray H(x, a^k) tends to 3^{-b/2} with b the Busemann value.
  for (const auto& x : G->ball(2)) {
    const double lim = free_boundary_limit(*G, x, 1);
    EXPECT_NEAR(H(x, G->parse("a^40")), lim, 0.05 * lim) << G->format(x);
  }
  EXPECT_NEAR(free_boundary_limit(*G, G->parse("a"), 1), std::pow(3.0, 0.5), 1e-15);
  auto bad = boundary_trace(H, G->ball(2), alt, one, o);
  EXPECT_EQ(bad.verdict, "not Cauchy");
}

TEST(Cocycle, ClosedFormIsExact) {
  auto G = std::make_shared<const Group>(GroupDescriptor::free_group(2));
  ClosedFormFreeKernel H(G);
  auto ball = G->ball(2);
  for (const auto& g : ball) {
    for (const auto& x : ball) {
      auto y = G->parse("a*b*b");
      EXPECT_LE(cocycle_check(H, g, x, y).residual, 1e-13);
    }
  }
  EXPECT_EQ(cocycle_check(H, G->identity(), G->parse("a"), G->parse("b")).residual, 0.0);
}

TEST(Cocycle, AmenableWithinUncertainty) {
  RatioKernel H(lazy_z2());
  const auto& G = lazy_z2()->group();
  for (const auto& g : G.ball(1)) {
    for (const auto& x : G.ball(1)) {
      auto r = cocycle_check(H, g, x, G.parse("(1,1)"));
      EXPECT_LE(r.residual, 3.0 * r.uncertainty + 1e-12);
    }
  }
}

TEST(Harmonicity, TrivialGroup) {
  auto c = make(GroupDescriptor::trivial(), "e 1\n", 8);
  RatioKernel H(c);
  auto r = rho_harmonicity_check(H, *c, spectral_radius(*c), c->group().identity(),
                                 c->group().identity());
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Harmonicity, ClosedFormWithExactRho) {
  auto c = lazy_f2();
  const auto& F = c->group();
  ClosedFormFreeKernel H(c->group_ptr());
  SpectralEstimate rho;
  rho.rho_hat = exact_f2_rho();
  for (const auto& x : F.ball(2)) {
    for (const char* y : {"a^5", "a*b*a*b", "e", "a"}) {
      EXPECT_LE(rho_harmonicity_check(H, *c, rho, x, F.parse(y)).residual, 1e-6);
    }
  }
}

TEST(Cartesian, ProductKernelFactorizes) {
  auto F = std::make_shared<const Group>(GroupDescriptor::free_group(2));
  auto Z = std::make_shared<const Group>(GroupDescriptor::lattice(1));
  auto P = std::make_shared<const Group>(GroupDescriptor::product(F->descriptor(), Z->descriptor()));
  auto H1 = std::make_shared<ClosedFormFreeKernel>(F);
  auto H2 = std::make_shared<ConstantKernel>(Z);
  ProductKernel H(P, H1, H2);
  for (const auto& y : P->ball(2)) EXPECT_EQ(H(P->identity(), y), 1.0);
  auto x = P->parse("[a;3]");
  auto y = P->parse("[a*b;-1]");
  EXPECT_EQ(H(x, y), (*H1)(F->parse("a"), F->parse("a*b")));
}

TEST(MartinVsRatio, IdentityRow) {
  auto c = lazy_f2();
  MartinKernel K(c, analyze_spectrum(*c));
  RatioKernel H(c);
  const auto& F = c->group();
  auto r = martin_vs_ratio(K, H, {F.identity()}, {F.parse("a^6"), F.parse("a^7")}, 0.05);
  EXPECT_TRUE(r.passed());
  for (const auto& res : r.residuals) EXPECT_EQ(res.value, 0.0);
}

}  // namespace
}  // namespace walkbench
