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

#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "walkbench/diagnostics.hpp"
#include "walkbench/kernel.hpp"
#include "walkbench/powers.hpp"

namespace walkbench {

using SparseOp = Eigen::SparseMatrix<double>;
using ComplexOp = Eigen::SparseMatrix<std::complex<double>>;

struct FockIndex {
  int level = 0;
  int row = 0;    // position of x in rows()
  int fiber = 0;  // position of z in fibers()
};

/// Finite slice of the Fock space: basis vectors e^(m)_{x,z} with
/// 0 <= m <= max_level, x in ball(x_radius), z in ball(z_radius) and
/// mu^{*m}(x^-1 z) > 0, ordered by (level, phi(x), phi(z)).
class FockWindow {
 public:
  FockWindow(std::shared_ptr<const PowersCache> cache, int max_level, int x_radius, int z_radius,
             int interior_margin);

  const PowersCache& cache() const { return *cache_; }
  const Group& group() const { return cache_->group(); }
  int max_level() const { return max_level_; }
  int margin() const { return margin_; }
  /// Levels >= max_level - margin are edge levels.
  bool is_edge(int level) const { return level >= max_level_ - margin_; }
  int interior_top() const { return max_level_ - margin_ - 1; }

  std::size_t size() const { return basis_.size(); }
  const std::vector<FockIndex>& basis() const { return basis_; }
  const FockIndex& at(std::size_t i) const { return basis_[i]; }
  /// Basis position of e^(level)_{rows[row], fibers[fiber]} or -1.
  int index(int level, int row, int fiber) const;

  const std::vector<GroupElement>& rows() const { return rows_; }
  const std::vector<GroupElement>& fibers() const { return fibers_; }
  int row_of(const GroupElement& x) const;     // -1 if outside
  int fiber_of(const GroupElement& z) const;   // -1 if outside

  /// log P^m_{rows[r], fibers[f]}, -inf when absent.
  double log_p(int m, int r, int f) const;
  bool present(int m, int r, int f) const;
  /// log P^n_{x,y} for arbitrary x, y (via the cache).
  double log_p(int n, const GroupElement& x, const GroupElement& y) const;

  /// Smallest m such that every row in `rows` reaches fiber f at all levels
  /// in [m, max_level]; max_level + 1 if there is none.
  int edge_threshold(const std::vector<int>& rows, int f) const;
  /// Indices of all rows.
  std::vector<int> all_rows() const;

  Json to_json() const;

 private:
  std::shared_ptr<const PowersCache> cache_;
  int max_level_;
  int margin_;
  std::vector<GroupElement> rows_;
  std::vector<GroupElement> fibers_;
  std::unordered_map<GroupElement, int, GroupElementHash> row_index_;
  std::unordered_map<GroupElement, int, GroupElementHash> fiber_index_;
  std::vector<FockIndex> basis_;
  std::vector<int> lookup_;       // (level, row, fiber) -> basis index
  std::vector<double> log_table_; // (level, row, fiber) -> log P
};

struct WindowedOperator {
  std::string label;
  SparseOp matrix;
  /// Level increase of the operator (negative for adjoint-type pieces).
  int shift = 0;
};

// Builders. Inputs whose image would leave the window are dropped. Rows
// named by group elements must lie in the window's row ball.
WindowedOperator build_S(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y);
WindowedOperator build_T(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y,
                         double rho);
WindowedOperator build_W(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y,
                         const KernelSource& H);
WindowedOperator build_V(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y);
WindowedOperator build_R(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                         const KernelSource& H);
WindowedOperator build_E(const FockWindow& w, const GroupElement& x, const GroupElement& y);
WindowedOperator build_U_x(const FockWindow& w, const GroupElement& x);
WindowedOperator build_U(const FockWindow& w);
WindowedOperator build_H_z(const FockWindow& w, const GroupElement& z, const GroupElement& x,
                           const GroupElement& y, const KernelSource& H);
WindowedOperator build_H(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                         const KernelSource& H);
/// p_x = S^(0)_{x,x}.
WindowedOperator build_projection(const FockWindow& w, const GroupElement& x);
/// V_g e^(m)_{x,y} = e^(m)_{gx,gy}.
WindowedOperator build_V_g(const FockWindow& w, const GroupElement& g);
/// U_zeta e^(m) = zeta^m e^(m).
ComplexOp build_gauge(const FockWindow& w, std::complex<double> zeta);

/// Minimal n with (x,x) and (x,y) in E(P^n); -1 if none within the cache.
int n0_for_E(const FockWindow& w, const GroupElement& x, const GroupElement& y);
/// Minimal n with (x,x) in E(P^n) and E(P^(n+1)).
int n0_for_U(const FockWindow& w, const GroupElement& x);

/// E_{x,y} = V^(n)*_{x,x} V^(n)_{x,y}.
WindowedOperator build_E_product(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                                 int n);
/// U_x = V^(n)*_{x,x} V^(n+1)_{x,x}.
WindowedOperator build_U_x_product(const FockWindow& w, const GroupElement& x, int n);
/// H^(z)_{x,y} = E_{z,y} R_{x,y} E_{y,z}.
WindowedOperator build_H_z_product(const FockWindow& w, const GroupElement& z,
                                   const GroupElement& x, const GroupElement& y,
                                   const KernelSource& H);
/// R_{x,y} = V^(n)*_{x,y} W^(n)_{x,y}.
WindowedOperator build_R_product(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                                 int n, const KernelSource& H);

/// {"basis": [[level, x, z], ...]} in basis order, elements as text.
Json dump_window(const FockWindow& w);
/// {"label", "shift", "dimension", "triplets": [[row, col, value], ...]}
/// with indices into the dump_window basis, column-major.
Json dump_operator(const WindowedOperator& op);

// Norms.
/// sqrt(||A||_1 ||A||_inf), an upper bound for the spectral norm.
double norm_bound(const SparseOp& a);
/// Largest singular value by power iteration on A^T A.
double power_norm(const SparseOp& a, std::uint64_t seed = 0x5eed, double tol = 1e-10,
                  int max_iter = 5000);
SparseOp keep_columns(const SparseOp& a, const std::vector<char>& keep);

struct GatedDefect {
  double bound = 0.0;        // norm bound above the thresholds
  double norm = 0.0;         // power-iteration norm above the thresholds
  double below = 0.0;        // norm bound on the sub-threshold columns
  int max_threshold = 0;     // largest per-fiber m_0 (+ extra)
  std::size_t gated_columns = 0;
};

/// Restricts D to columns (m, r, f) with m_0(f) + extra <= m <= top, where
/// m_0(f) = edge_threshold(rows, f) and top = min(interior_top,
/// max_level - shift), and measures what is left.
GatedDefect gated_defect(const FockWindow& w, const SparseOp& D, const std::vector<int>& rows,
                         int extra, int shift, std::uint64_t seed = 0x5eed);

struct DefectOptions {
  double tol = 1e-12;
  std::uint64_t seed = 0x5eed;
};

/// E_{x,y}E_{y',z} - delta E_{x,z}, E_{x,y}^* - E_{y,x}, and the V*V
/// product form of E, for all tuples drawn from `elems`.
DiagnosticsReport matrix_unit_defects(const FockWindow& w, const std::vector<GroupElement>& elems,
                                      const DefectOptions& opts = {});

/// U*U - I, UU* - I, [E_{x,y}, U], [H_{x,y}, U], and the product forms of
/// U_x, R and H^(z).
DiagnosticsReport unitary_and_commutation_defects(const FockWindow& w, const KernelSource& H,
                                                  const std::vector<GroupElement>& elems,
                                                  const DefectOptions& opts = {});

/// W^(n)_{x,y} - U_x^n E_{x,e} H^(e)_{x,y} E_{e,y}.
DiagnosticsReport generator_identity_defect(const FockWindow& w, const KernelSource& H, int n,
                                            const GroupElement& x, const GroupElement& y,
                                            const DefectOptions& opts = {});

/// Per-level |T - W| on each fiber at m in {M/4, M/2, 3M/4}; passes when
/// strictly decreasing on every fiber.
DiagnosticsReport tw_defect_decay(const FockWindow& w, const KernelSource& H, double rho, int n,
                                  const GroupElement& x, const GroupElement& y);

/// R^(0)_x = S^(0)_{xx} - sum_y S^(1)_{xy} S^(1)*_{xy} fixes e^(0)_{x,x} and
/// kills every other interior basis vector.
DiagnosticsReport q0_projection_check(const FockWindow& w, const GroupElement& x,
                                      const DefectOptions& opts = {});

/// U_{n,m} U_{n,m}^* = I on span{e_{x,z}} over the balls.
DiagnosticsReport subproduct_coisometry_check(const PowersCache& cache, int n, int m, int x_radius,
                                              int z_radius, double tol = 1e-12);

/// V_g S V_g^-1 = S_{gx,gy} and U_zeta S U_zeta^-1 = zeta^n S on the region
/// where g moves the window into itself.
DiagnosticsReport covariance_check(const FockWindow& w, const GroupElement& g,
                                   std::complex<double> zeta, int n, const GroupElement& x,
                                   const GroupElement& y, double tol = 1e-12);

struct QuotientNormEstimate {
  double value = 0.0;
  int argmax_fiber = -1;
  std::vector<int> ladder;
  /// norms[f][k] for fiber f and ladder rung k.
  std::vector<std::vector<double>> norms;
  double spread = 0.0;  // max over fibers of ladder max - min
  bool stabilized = true;
};

/// sup over fibers of the norm of T restricted to levels [m, interior top]
/// of that fiber, read at the last rung of m in {M/4, M/2, 3M/4}.
QuotientNormEstimate quotient_norm_estimate(const FockWindow& w, const SparseOp& T,
                                            const std::vector<int>& fibers,
                                            double stabilize_tol = 1e-6,
                                            std::uint64_t seed = 0x5eed);

}  // namespace walkbench
