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
#include <complex>
#include <sstream>

#include "walkbench/errors.hpp"
#include "walkbench/fock.hpp"
#include "walkbench/ratio_limit.hpp"

namespace walkbench {
namespace {

std::shared_ptr<const PowersCache> make(GroupDescriptor d, const std::string& text, int M) {
  auto G = std::make_shared<const Group>(std::move(d));
  std::istringstream in(text);
  return build_powers(G, parse_measure(*G, in), M);
}

std::shared_ptr<const PowersCache> trivial() {
  static auto c = make(GroupDescriptor::trivial(), "e 1\n", 8);
  return c;
}
std::shared_ptr<const PowersCache> lazy_z() {
  static auto c = make(GroupDescriptor::lattice(1), "0 1/2\n1 1/4\n-1 1/4\n", 400);
  return c;
}
std::shared_ptr<const PowersCache> lazy_f2() {
  static auto c = make(GroupDescriptor::free_group(2), "e 1/5\na 1/5\nA 1/5\nb 1/5\nB 1/5\n", 400);
  return c;
}

double coeff(const SparseOp& A, int out, int in) {
  if (out < 0 || in < 0) return std::nan("");
  return A.coeff(out, in);
}

TEST(Window, TrivialGroup) {
  FockWindow w(trivial(), 3, 1, 1, 1);
  EXPECT_EQ(w.size(), 4u);
  for (int m = 0; m <= 3; ++m) EXPECT_EQ(w.index(m, 0, 0), m);
}

TEST(Window, EdgeRule) {
  FockWindow w(lazy_z(), 2, 2, 2, 1);
  const auto& Z = w.group();
  const int r0 = w.row_of(Z.identity());
  EXPECT_GE(w.index(1, r0, w.fiber_of(Z.parse("1"))), 0);
  EXPECT_EQ(w.index(1, r0, w.fiber_of(Z.parse("2"))), -1);
}

TEST(Window, BasisSizeMatchesRecount) {
  for (auto c : {lazy_z(), lazy_f2()}) {
    FockWindow w(c, 6, 1, 2, 1);
    const auto& G = c->group();
    std::size_t count = 0;
    for (int m = 0; m <= 6; ++m) {
      for (const auto& x : G.ball(1)) {
        for (const auto& z : G.ball(2)) count += transition(*c, m, x, z) > 0.0;
      }
    }
    EXPECT_EQ(w.size(), count);
    // Ordered by (level, phi(x), phi(z)).
    for (std::size_t i = 1; i < w.size(); ++i) {
      const auto& a = w.at(i - 1);
      const auto& b = w.at(i);
      EXPECT_LT(std::tie(a.level, a.row, a.fiber), std::tie(b.level, b.row, b.fiber));
    }
  }
}

TEST(Window, DeeperThanCacheIsRejected) {
  EXPECT_THROW(FockWindow(trivial(), 20, 1, 1, 1), Error);
}

TEST(Shift, NormAtMostOne) {
  for (auto c : {lazy_z(), lazy_f2()}) {
    FockWindow w(c, 12, 1, 2, 2);
    const auto& G = c->group();
    for (const auto& x : G.ball(1)) {
      for (const auto& y : G.ball(1)) {
        for (int n : {0, 1, 2}) {
          if (transition(*c, n, x, y) == 0.0) continue;
          auto S = build_S(w, n, x, y);
          EXPECT_LE(power_norm(S.matrix), 1.0 + 1e-12);
        }
      }
    }
  }
}

TEST(Shift, ZeroShiftIsDiagonalProjection) {
  FockWindow w(lazy_z(), 6, 2, 2, 1);
  const auto& Z = w.group();
  auto x = Z.parse("1");
  SparseOp diff = build_S(w, 0, x, x).matrix - build_projection(w, x).matrix;
  EXPECT_EQ(norm_bound(diff), 0.0);
  auto p = build_projection(w, x).matrix;
  EXPECT_EQ(norm_bound(SparseOp(p * p - p)), 0.0);
  const int r = w.row_of(x);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& b = w.at(i);
    EXPECT_EQ(p.coeff(static_cast<int>(i), static_cast<int>(i)), b.row == r ? 1.0 : 0.0);
  }
}

TEST(Shift, LazyZCoefficient) {
  FockWindow w(lazy_z(), 4, 2, 2, 1);
  const auto& Z = w.group();
  auto S = build_S(w, 1, Z.identity(), Z.parse("1"));
  const int in = w.index(1, w.row_of(Z.parse("1")), w.fiber_of(Z.parse("2")));
  const int out = w.index(2, w.row_of(Z.identity()), w.fiber_of(Z.parse("2")));
  const double oracle = std::sqrt((0.25 * 0.25) / (1.0 / 16.0));
  EXPECT_NEAR(coeff(S.matrix, out, in), oracle, 1e-15);
  EXPECT_EQ(S.shift, 1);
}

TEST(Shift, AbsentEdgeIsRejected) {
  FockWindow w(lazy_z(), 4, 2, 2, 1);
  const auto& Z = w.group();
  EXPECT_THROW(build_S(w, 1, Z.identity(), Z.parse("2")), PreconditionError);
}

TEST(TW, TrivialGroupIsPlainShift) {
  FockWindow w(trivial(), 5, 1, 1, 1);
  auto e = w.group().identity();
  ConstantKernel H(w.cache().group_ptr());
  for (const auto& op : {build_T(w, 1, e, e, 1.0), build_W(w, 1, e, e, H)}) {
    for (int m = 0; m < 5; ++m) EXPECT_EQ(coeff(op.matrix, m + 1, m), 1.0);
  }
}

TEST(TW, FreePerLevelDefect) {
  auto c = lazy_f2();
  RatioKernel H(c);
  const double rho = spectral_radius(*c).rho_hat;
  const auto& F = c->group();
  auto x = F.identity();
  auto y = F.parse("a");
  const int m = 300;
  for (const auto& z : F.ball(2)) {
    const double lhs = std::sqrt(rho * transition(*c, m, y, z) / transition(*c, m + 1, x, z));
    const double rhs = std::sqrt(H(F.relative(x, y), F.relative(x, z)));
    EXPECT_LE(std::abs(lhs - rhs), 1e-2) << F.format(z);
  }
}

TEST(TW, DefectDecaysOnLazyZ) {
  auto c = lazy_z();
  FockWindow w(c, 24, 4, 6, 4);
  RatioKernel H(c);
  const auto& Z = c->group();
  auto r = tw_defect_decay(w, H, spectral_radius(*c).rho_hat, 1, Z.identity(), Z.parse("1"));
  EXPECT_TRUE(r.passed()) << r.to_json().dump();
}

TEST(Products, MatrixUnitsOnInteriorRows) {
  auto c = lazy_z();
  FockWindow w(c, 10, 2, 3, 2);
  const auto& Z = c->group();
  auto x = Z.parse("1");
  auto E = build_E(w, x, x);
  const int r = w.row_of(x);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& b = w.at(i);
    if (b.row != r || w.is_edge(b.level)) continue;
    EXPECT_EQ(E.matrix.coeff(static_cast<int>(i), static_cast<int>(i)), 1.0);
  }
  auto U = build_U_x(w, x);
  EXPECT_EQ(U.shift, 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& b = w.at(i);
    if (b.row != r || b.level + 1 > w.interior_top()) continue;
    const int out = w.index(b.level + 1, b.row, b.fiber);
    if (out < 0) continue;
    EXPECT_EQ(U.matrix.coeff(out, static_cast<int>(i)), 1.0);
  }
}

TEST(Products, FormulaAgreesWithProductForm) {
  auto c = lazy_f2();
  FockWindow w(c, 12, 1, 2, 3);
  RatioKernel H(c);
  const auto& F = c->group();
  auto x = F.identity();
  auto y = F.parse("a");
  const int n = n0_for_E(w, x, y);
  ASSERT_GE(n, 0);
  SparseOp dE = build_E(w, x, y).matrix - build_E_product(w, x, y, n).matrix;
  auto g = gated_defect(w, dE, w.all_rows(), 0, 0);
  EXPECT_LE(g.bound, 1e-12);
  const int nu = n0_for_U(w, x);
  SparseOp dU = build_U_x(w, x).matrix - build_U_x_product(w, x, nu).matrix;
  EXPECT_LE(gated_defect(w, dU, w.all_rows(), 0, 1).bound, 1e-12);
}

TEST(Defects, TrivialGroupVanish) {
  FockWindow w(trivial(), 6, 1, 1, 1);
  ConstantKernel H(w.cache().group_ptr());
  auto e = w.group().identity();
  EXPECT_TRUE(matrix_unit_defects(w, {e}).passed());
  auto u = unitary_and_commutation_defects(w, H, {e});
  EXPECT_TRUE(u.passed());
  for (const auto& r : u.residuals) EXPECT_LE(r.value, 1e-15) << r.label;
  EXPECT_TRUE(generator_identity_defect(w, H, 1, e, e).passed());
}

TEST(Defects, LazyZAboveThreshold) {
  auto c = lazy_z();
  FockWindow w(c, 24, 4, 6, 4);
  RatioKernel H(c);
  const auto& Z = c->group();
  auto elems = Z.ball(1);
  auto mu = matrix_unit_defects(w, elems);
  EXPECT_TRUE(mu.passed()) << mu.to_json().dump();
  auto uc = unitary_and_commutation_defects(w, H, elems);
  EXPECT_TRUE(uc.passed()) << uc.to_json().dump();
  auto gi = generator_identity_defect(w, H, 1, Z.identity(), Z.parse("1"));
  EXPECT_TRUE(gi.passed()) << gi.to_json().dump();
}

TEST(Defects, MatrixUnitThresholdOnLazyZ) {
  auto c = lazy_z();
  FockWindow w(c, 16, 3, 4, 3);
  const auto& Z = c->group();
  auto x = Z.identity();
  auto y = Z.parse("1");
  auto z = Z.parse("2");
  SparseOp D = build_E(w, x, y).matrix * build_E(w, y, z).matrix - build_E(w, x, z).matrix;
  std::vector<int> rows{w.row_of(x), w.row_of(y), w.row_of(z)};
  auto g = gated_defect(w, D, rows, 0, 0);
  EXPECT_LE(g.bound, 1e-12);
  // Lazy walk: row r reaches fiber f from level |r - f| on, so the worst
  // fiber is -4 seen from 2.
  int want = 0;
  for (int r : {0, 1, 2}) {
    for (int f = -4; f <= 4; ++f) want = std::max(want, std::abs(r - f));
  }
  EXPECT_EQ(g.max_threshold, want);
}

TEST(Defects, FreeAboveThreshold) {
  auto c = lazy_f2();
  FockWindow w(c, 16, 1, 2, 4);
  RatioKernel H(c);
  const auto& F = c->group();
  auto elems = F.ball(1);
  EXPECT_TRUE(matrix_unit_defects(w, elems).passed());
  EXPECT_TRUE(unitary_and_commutation_defects(w, H, elems).passed());
  EXPECT_TRUE(generator_identity_defect(w, H, 1, F.identity(), F.parse("a")).passed());
}

TEST(Q0, LazyZ) {
  FockWindow w(lazy_z(), 12, 2, 3, 2);
  for (const char* x : {"0", "1"}) {
    auto r = q0_projection_check(w, w.group().parse(x));
    EXPECT_TRUE(r.passed()) << r.to_json().dump();
  }
}

TEST(Coisometry, Cases) {
  EXPECT_TRUE(subproduct_coisometry_check(*lazy_z(), 0, 3, 2, 3).passed());
  EXPECT_TRUE(subproduct_coisometry_check(*lazy_z(), 3, 0, 2, 3).passed());
  EXPECT_TRUE(subproduct_coisometry_check(*lazy_z(), 1, 1, 2, 3).passed());
  EXPECT_TRUE(subproduct_coisometry_check(*lazy_f2(), 1, 2, 1, 2).passed());
}

TEST(Covariance, IdentityAndTranslation) {
  auto c = lazy_z();
  const auto& Z = c->group();
  FockWindow w(c, 12, 8, 10, 2);
  auto id = covariance_check(w, Z.identity(), 1.0, 1, Z.identity(), Z.parse("1"));
  EXPECT_TRUE(id.passed());
  for (const auto& r : id.residuals) EXPECT_EQ(r.value, 0.0);
  auto five = covariance_check(w, Z.parse("5"), 1.0, 1, Z.identity(), Z.parse("1"));
  EXPECT_TRUE(five.passed()) << five.to_json().dump();
}

TEST(Covariance, GaugePhase) {
  FockWindow w(lazy_z(), 8, 2, 3, 2);
  const auto& Z = w.group();
  const std::complex<double> i(0.0, 1.0);
  auto U = build_gauge(w, i);
  auto Uinv = build_gauge(w, std::conj(i));
  const ComplexOp S = build_S(w, 1, Z.identity(), Z.parse("1")).matrix.cast<std::complex<double>>();
  ComplexOp conj = U * S * Uinv;
  ComplexOp want = i * S;
  ComplexOp diff = conj - want;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (ComplexOp::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  EXPECT_LE(worst, 1e-15);
  auto r = covariance_check(w, Z.identity(), i, 1, Z.identity(), Z.parse("1"));
  EXPECT_TRUE(r.passed());
}

TEST(QuotientNorm, Projection) {
  FockWindow w(lazy_f2(), 16, 1, 2, 2);
  auto p = build_projection(w, w.group().identity());
  std::vector<int> fibers(w.fibers().size());
  for (std::size_t f = 0; f < fibers.size(); ++f) fibers[f] = static_cast<int>(f);
  auto q = quotient_norm_estimate(w, p.matrix, fibers);
  EXPECT_NEAR(q.value, 1.0, 1e-9);
  EXPECT_TRUE(q.stabilized);
}

TEST(QuotientNorm, LadderMustFitInterior) {
  FockWindow w(lazy_f2(), 16, 1, 2, 4);
  std::vector<int> fibers{0};
  EXPECT_THROW(quotient_norm_estimate(w, build_projection(w, w.group().identity()).matrix, fibers),
               Error);
}

TEST(QuotientNorm, Monomial) {
  auto c = lazy_f2();
  FockWindow w(c, 20, 1, 2, 4);
  RatioKernel H(c);
  const auto& F = c->group();
  auto x = F.identity();
  auto y = F.parse("a");
  auto Hop = build_H_z(w, F.identity(), x, y, H);
  std::vector<int> fibers(w.fibers().size());
  for (std::size_t f = 0; f < fibers.size(); ++f) fibers[f] = static_cast<int>(f);
  auto q = quotient_norm_estimate(w, Hop.matrix, fibers);
  double want = 0.0;
  for (const auto& z : w.fibers()) {
    want = std::max(want, std::sqrt(H(F.relative(x, y), F.relative(x, z))));
  }
  EXPECT_NEAR(q.value, want, 0.02 * want);
}

TEST(Dumps, Schema) {
  FockWindow w(lazy_z(), 3, 1, 1, 1);
  auto d = dump_window(w);
  ASSERT_EQ(d["basis"].size(), w.size());
  EXPECT_EQ(d["basis"][0][0], 0);
  auto S = build_S(w, 1, w.group().identity(), w.group().parse("1"));
  auto j = dump_operator(S);
  EXPECT_EQ(j["shift"], 1);
  EXPECT_EQ(j["dimension"], w.size());
  EXPECT_EQ(j["triplets"].size(), static_cast<std::size_t>(S.matrix.nonZeros()));
}

TEST(Norms, PowerNormMatchesKnownMatrix) {
  SparseOp A(2, 2);
  A.insert(0, 0) = 3.0;
  A.insert(1, 1) = 4.0;
  A.insert(0, 1) = 0.0;
  EXPECT_NEAR(power_norm(A), 4.0, 1e-9);
  EXPECT_NEAR(norm_bound(A), 4.0, 1e-15);
  EXPECT_EQ(power_norm(A, 7), power_norm(A, 7));
}

}  // namespace
}  // namespace walkbench
