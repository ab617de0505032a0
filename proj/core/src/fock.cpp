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

#include "walkbench/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "walkbench/errors.hpp"

namespace walkbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Triplet = Eigen::Triplet<double>;

SparseOp assemble(std::size_t n, const std::vector<Triplet>& t) {
  SparseOp a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

int need_row(const FockWindow& w, const GroupElement& x) {
  const int r = w.row_of(x);
  if (r < 0) {
    throw PreconditionError("element " + w.group().format(x) + " lies outside the window rows");
  }
  return r;
}

double need_edge(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y) {
  const double l = w.log_p(n, x, y);
  if (l == kNegInf) {
    throw PreconditionError("(" + w.group().format(x) + ", " + w.group().format(y) +
                            ") is not an edge of P^" + std::to_string(n));
  }
  return l;
}

/// sqrt H(x^-1 y, x^-1 z) for every fiber z.
std::vector<double> sqrt_h_by_fiber(const FockWindow& w, const GroupElement& x,
                                    const GroupElement& y, const KernelSource& H) {
  const auto& G = w.group();
  const auto a = G.relative(x, y);
  std::vector<double> out(w.fibers().size());
  for (std::size_t f = 0; f < out.size(); ++f) {
    const double h = H(a, G.relative(x, w.fibers()[f]));
    out[f] = std::sqrt(std::max(0.0, h));
  }
  return out;
}

/// Shared shape of S, T, W and V: e^(m)_{y,z} -> c(m, z) e^(m+n)_{x,z}.
template <typename Coef>
WindowedOperator raise_op(const FockWindow& w, std::string label, int n, int xi, int yi,
                          Coef coef) {
  std::vector<Triplet> t;
  const int F = static_cast<int>(w.fibers().size());
  for (int m = 0; m + n <= w.max_level(); ++m) {
    for (int f = 0; f < F; ++f) {
      const int j = w.index(m, yi, f);
      if (j < 0) continue;
      const int i = w.index(m + n, xi, f);
      if (i < 0) continue;
      t.emplace_back(i, j, coef(m, f));
    }
  }
  return {std::move(label), assemble(w.size(), t), n};
}

template <typename Scalar>
double norm_bound_impl(const Eigen::SparseMatrix<Scalar>& a) {
  if (a.nonZeros() == 0) return 0.0;
  std::vector<double> rows(static_cast<std::size_t>(a.rows()), 0.0);
  double col_max = 0.0;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    double s = 0.0;
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, k); it; ++it) {
      const double v = std::abs(it.value());
      s += v;
      rows[static_cast<std::size_t>(it.row())] += v;
    }
    col_max = std::max(col_max, s);
  }
  const double row_max = *std::max_element(rows.begin(), rows.end());
  return std::sqrt(col_max * row_max);
}

struct Worst {
  double bound = 0.0;
  double below = 0.0;
  int threshold = 0;
  std::size_t columns = 0;
  int cases = 0;
  std::string where;

  void take(const GatedDefect& d, const std::string& label) {
    ++cases;
    columns += d.gated_columns;
    threshold = std::max(threshold, d.max_threshold);
    below = std::max(below, d.below);
    if (d.bound >= bound) {
      bound = d.bound;
      where = label;
    }
  }
};

void record(DiagnosticsReport& rep, const std::string& label, const Worst& w, double tol) {
  rep.add(label, w.bound, tol);
  rep.details[label] = {{"cases", w.cases},
                        {"gated_columns", w.columns},
                        {"max_threshold", w.threshold},
                        {"below_threshold_norm", w.below},
                        {"worst_case", w.where}};
  if (w.columns == 0) {
    rep.add_flag(label + " coverage", 0.0, 0.0, false);
  }
}

std::string name_of(const Group& G, const GroupElement& a) { return G.format(a); }

/// Support of mu^{*n}, enumerated from the cache.
std::vector<GroupElement> support_of(const PowersCache& cache, int n) {
  if (const auto* gp = dynamic_cast<const GenericPowers*>(&cache)) {
    std::vector<GroupElement> out;
    for (const auto& [g, v] : gp->level(n).support) out.push_back(g);
    return out;
  }
  const auto& G = cache.group();
  std::int64_t r = 0;
  for (const auto& [g, v] : cache.step().support) r = std::max(r, G.word_length(g));
  std::vector<GroupElement> out;
  for (const auto& g : G.ball(static_cast<int>(r * n))) {
    if (cache.present(n, g)) out.push_back(g);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FockWindow

FockWindow::FockWindow(std::shared_ptr<const PowersCache> cache, int max_level, int x_radius,
                       int z_radius, int interior_margin)
    : cache_(std::move(cache)), max_level_(max_level), margin_(interior_margin) {
  if (!cache_) throw InvalidArgument("window needs a powers cache");
  if (max_level_ < 1 || max_level_ > cache_->depth()) {
    throw InvalidArgument("window depth " + std::to_string(max_level_) +
                          " outside [1, cache depth " + std::to_string(cache_->depth()) + "]");
  }
  if (margin_ < 0 || margin_ >= max_level_) throw InvalidArgument("bad interior margin");
  if (x_radius < 0 || z_radius < 0) throw InvalidArgument("ball radii must be nonnegative");

  const auto& G = cache_->group();
  rows_ = G.ball(x_radius);
  fibers_ = G.ball(z_radius);
  for (std::size_t i = 0; i < rows_.size(); ++i) row_index_.emplace(rows_[i], static_cast<int>(i));
  for (std::size_t i = 0; i < fibers_.size(); ++i) {
    fiber_index_.emplace(fibers_[i], static_cast<int>(i));
  }

  const std::size_t R = rows_.size(), F = fibers_.size();
  const std::size_t L = static_cast<std::size_t>(max_level_) + 1;
  log_table_.assign(L * R * F, kNegInf);
  lookup_.assign(L * R * F, -1);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t f = 0; f < F; ++f) {
      const auto a = G.relative(rows_[r], fibers_[f]);
      for (std::size_t m = 0; m < L; ++m) {
        log_table_[(m * R + r) * F + f] = cache_->log_value(static_cast<int>(m), a);
      }
    }
  }
  for (std::size_t m = 0; m < L; ++m) {
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t f = 0; f < F; ++f) {
        const std::size_t k = (m * R + r) * F + f;
        if (log_table_[k] == kNegInf) continue;
        lookup_[k] = static_cast<int>(basis_.size());
        basis_.push_back({static_cast<int>(m), static_cast<int>(r), static_cast<int>(f)});
      }
    }
  }
}

int FockWindow::index(int level, int row, int fiber) const {
  if (level < 0 || level > max_level_) return -1;
  const std::size_t R = rows_.size(), F = fibers_.size();
  return lookup_[(static_cast<std::size_t>(level) * R + row) * F + fiber];
}

int FockWindow::row_of(const GroupElement& x) const {
  auto it = row_index_.find(x);
  return it == row_index_.end() ? -1 : it->second;
}

int FockWindow::fiber_of(const GroupElement& z) const {
  auto it = fiber_index_.find(z);
  return it == fiber_index_.end() ? -1 : it->second;
}

double FockWindow::log_p(int m, int r, int f) const {
  if (m < 0 || m > max_level_) throw InvalidArgument("level outside the window");
  const std::size_t R = rows_.size(), F = fibers_.size();
  return log_table_[(static_cast<std::size_t>(m) * R + r) * F + f];
}

bool FockWindow::present(int m, int r, int f) const { return log_p(m, r, f) != kNegInf; }

double FockWindow::log_p(int n, const GroupElement& x, const GroupElement& y) const {
  if (n < 0 || n > cache_->depth()) throw InvalidArgument("level outside the cache");
  return cache_->log_value(n, group().relative(x, y));
}

int FockWindow::edge_threshold(const std::vector<int>& rows, int f) const {
  for (int m = max_level_; m >= 0; --m) {
    for (int r : rows) {
      if (!present(m, r, f)) return m + 1;
    }
  }
  return 0;
}

std::vector<int> FockWindow::all_rows() const {
  std::vector<int> out(rows_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

Json FockWindow::to_json() const {
  return {{"group", group().descriptor().to_string()},
          {"engine", engine_name(cache_->kind())},
          {"max_level", max_level_},
          {"interior_margin", margin_},
          {"rows", rows_.size()},
          {"fibers", fibers_.size()},
          {"dimension", basis_.size()}};
}

// ---------------------------------------------------------------------------
// Builders

WindowedOperator build_S(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y) {
  const int xi = need_row(w, x), yi = need_row(w, y);
  const double lxy = need_edge(w, n, x, y);
  return raise_op(w, "S", n, xi, yi, [&](int m, int f) {
    return std::exp(0.5 * (lxy + w.log_p(m, yi, f) - w.log_p(m + n, xi, f)));
  });
}

WindowedOperator build_T(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y,
                         double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("T needs a positive spectral radius");
  const int xi = need_row(w, x), yi = need_row(w, y);
  need_edge(w, n, x, y);
  const double lr = n * std::log(rho);
  return raise_op(w, "T", n, xi, yi, [&](int m, int f) {
    return std::exp(0.5 * (lr + w.log_p(m, yi, f) - w.log_p(m + n, xi, f)));
  });
}

WindowedOperator build_W(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y,
                         const KernelSource& H) {
  const int xi = need_row(w, x), yi = need_row(w, y);
  need_edge(w, n, x, y);
  const auto h = sqrt_h_by_fiber(w, x, y, H);
  return raise_op(w, "W", n, xi, yi, [&](int, int f) { return h[f]; });
}

WindowedOperator build_V(const FockWindow& w, int n, const GroupElement& x, const GroupElement& y) {
  const int xi = need_row(w, x), yi = need_row(w, y);
  need_edge(w, n, x, y);
  return raise_op(w, "V", n, xi, yi, [](int, int) { return 1.0; });
}

WindowedOperator build_R(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                         const KernelSource& H) {
  const int yi = need_row(w, y);
  const auto h = sqrt_h_by_fiber(w, x, y, H);
  auto op = raise_op(w, "R", 0, yi, yi, [&](int, int f) { return h[f]; });
  return op;
}

WindowedOperator build_E(const FockWindow& w, const GroupElement& x, const GroupElement& y) {
  const int xi = need_row(w, x), yi = need_row(w, y);
  return raise_op(w, "E", 0, xi, yi, [](int, int) { return 1.0; });
}

WindowedOperator build_U_x(const FockWindow& w, const GroupElement& x) {
  const int xi = need_row(w, x);
  return raise_op(w, "U_x", 1, xi, xi, [](int, int) { return 1.0; });
}

WindowedOperator build_U(const FockWindow& w) {
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto& b = w.at(j);
    const int i = w.index(b.level + 1, b.row, b.fiber);
    if (i >= 0) t.emplace_back(i, static_cast<int>(j), 1.0);
  }
  return {"U", assemble(w.size(), t), 1};
}

WindowedOperator build_H_z(const FockWindow& w, const GroupElement& z, const GroupElement& x,
                           const GroupElement& y, const KernelSource& H) {
  const int zi = need_row(w, z), yi = need_row(w, y);
  const auto h = sqrt_h_by_fiber(w, x, y, H);
  std::vector<Triplet> t;
  const int F = static_cast<int>(w.fibers().size());
  for (int m = 0; m <= w.max_level(); ++m) {
    for (int f = 0; f < F; ++f) {
      const int j = w.index(m, zi, f);
      if (j < 0 || !w.present(m, yi, f)) continue;
      t.emplace_back(j, j, h[f]);
    }
  }
  return {"H^(z)", assemble(w.size(), t), 0};
}

WindowedOperator build_H(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                         const KernelSource& H) {
  SparseOp sum(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(w.size()));
  for (const auto& z : w.rows()) sum += build_H_z(w, z, x, y, H).matrix;
  return {"H", sum, 0};
}

WindowedOperator build_projection(const FockWindow& w, const GroupElement& x) {
  auto op = build_S(w, 0, x, x);
  op.label = "p_x";
  return op;
}

WindowedOperator build_V_g(const FockWindow& w, const GroupElement& g) {
  const auto& G = w.group();
  std::vector<int> row_map(w.rows().size()), fiber_map(w.fibers().size());
  for (std::size_t r = 0; r < row_map.size(); ++r) {
    row_map[r] = w.row_of(G.multiply(g, w.rows()[r]));
  }
  for (std::size_t f = 0; f < fiber_map.size(); ++f) {
    fiber_map[f] = w.fiber_of(G.multiply(g, w.fibers()[f]));
  }
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto& b = w.at(j);
    const int r = row_map[b.row], f = fiber_map[b.fiber];
    if (r < 0 || f < 0) continue;
    const int i = w.index(b.level, r, f);
    if (i >= 0) t.emplace_back(i, static_cast<int>(j), 1.0);
  }
  return {"V_g", assemble(w.size(), t), 0};
}

ComplexOp build_gauge(const FockWindow& w, std::complex<double> zeta) {
  std::vector<Eigen::Triplet<std::complex<double>>> t;
  std::vector<std::complex<double>> powers(static_cast<std::size_t>(w.max_level()) + 1);
  powers[0] = 1.0;
  for (std::size_t m = 1; m < powers.size(); ++m) powers[m] = powers[m - 1] * zeta;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const int jj = static_cast<int>(j);
    t.emplace_back(jj, jj, powers[static_cast<std::size_t>(w.at(j).level)]);
  }
  ComplexOp a(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(w.size()));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

int n0_for_E(const FockWindow& w, const GroupElement& x, const GroupElement& y) {
  const auto& c = w.cache();
  const auto e = w.group().identity();
  const auto a = w.group().relative(x, y);
  for (int n = 0; n <= c.depth(); ++n) {
    if (c.present(n, e) && c.present(n, a)) return n;
  }
  return -1;
}

int n0_for_U(const FockWindow& w, const GroupElement& /*x*/) {
  const auto& c = w.cache();
  const auto e = w.group().identity();
  for (int n = 0; n < c.depth(); ++n) {
    if (c.present(n, e) && c.present(n + 1, e)) return n;
  }
  return -1;
}

WindowedOperator build_E_product(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                                 int n) {
  const auto vxx = build_V(w, n, x, x);
  const auto vxy = build_V(w, n, x, y);
  SparseOp p = SparseOp(vxx.matrix.transpose()) * vxy.matrix;
  return {"V*V", p, 0};
}

WindowedOperator build_U_x_product(const FockWindow& w, const GroupElement& x, int n) {
  const auto a = build_V(w, n, x, x);
  const auto b = build_V(w, n + 1, x, x);
  SparseOp p = SparseOp(a.matrix.transpose()) * b.matrix;
  return {"V*V", p, 1};
}

WindowedOperator build_H_z_product(const FockWindow& w, const GroupElement& z,
                                   const GroupElement& x, const GroupElement& y,
                                   const KernelSource& H) {
  const auto ezy = build_E(w, z, y);
  const auto r = build_R(w, x, y, H);
  const auto eyz = build_E(w, y, z);
  SparseOp p = ezy.matrix * (r.matrix * eyz.matrix);
  return {"ERE", p, 0};
}

WindowedOperator build_R_product(const FockWindow& w, const GroupElement& x, const GroupElement& y,
                                 int n, const KernelSource& H) {
  const auto v = build_V(w, n, x, y);
  const auto wn = build_W(w, n, x, y, H);
  SparseOp p = SparseOp(v.matrix.transpose()) * wn.matrix;
  return {"V*W", p, 0};
}

Json dump_window(const FockWindow& w) {
  Json basis = Json::array();
  const auto& G = w.group();
  for (const auto& b : w.basis()) {
    basis.push_back({b.level, G.format(w.rows()[b.row]), G.format(w.fibers()[b.fiber])});
  }
  Json j = w.to_json();
  j["basis"] = basis;
  return j;
}

Json dump_operator(const WindowedOperator& op) {
  Json t = Json::array();
  for (Eigen::Index k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseOp::InnerIterator it(op.matrix, k); it; ++it) {
      t.push_back({it.row(), it.col(), it.value()});
    }
  }
  return {{"label", op.label}, {"shift", op.shift}, {"dimension", op.matrix.rows()},
          {"triplets", t}};
}

// ---------------------------------------------------------------------------
// Norms

double norm_bound(const SparseOp& a) { return norm_bound_impl(a); }

double power_norm(const SparseOp& a, std::uint64_t seed, double tol, int max_iter) {
  if (a.nonZeros() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
  v.normalize();
  double s = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = a * v;
    const double s_new = y.norm();
    Eigen::VectorXd z = a.transpose() * y;
    const double zn = z.norm();
    if (zn == 0.0) return s_new;
    v = z / zn;
    if (std::abs(s_new - s) <= tol * s_new) return s_new;
    s = s_new;
  }
  return s;
}

SparseOp keep_columns(const SparseOp& a, const std::vector<char>& keep) {
  SparseOp out = a;
  out.prune([&](const Eigen::Index&, const Eigen::Index& col, const double&) {
    return keep[static_cast<std::size_t>(col)] != 0;
  });
  return out;
}

GatedDefect gated_defect(const FockWindow& w, const SparseOp& D, const std::vector<int>& rows,
                         int extra, int shift, std::uint64_t seed) {
  const int top = std::min(w.interior_top(), w.max_level() - std::max(0, shift));
  std::vector<int> m0(w.fibers().size());
  for (std::size_t f = 0; f < m0.size(); ++f) {
    m0[f] = w.edge_threshold(rows, static_cast<int>(f)) + extra;
  }
  std::vector<char> above(w.size(), 0), below(w.size(), 0);
  GatedDefect g;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto& b = w.at(j);
    if (b.level > top) continue;
    if (b.level >= m0[b.fiber]) {
      above[j] = 1;
      ++g.gated_columns;
      g.max_threshold = std::max(g.max_threshold, m0[b.fiber]);
    } else {
      below[j] = 1;
    }
  }
  const SparseOp da = keep_columns(D, above);
  g.bound = norm_bound(da);
  g.norm = power_norm(da, seed);
  g.below = norm_bound(keep_columns(D, below));
  return g;
}

// ---------------------------------------------------------------------------
// Checks

DiagnosticsReport matrix_unit_defects(const FockWindow& w, const std::vector<GroupElement>& elems,
                                      const DefectOptions& opts) {
  const auto& G = w.group();
  DiagnosticsReport rep;
  rep.name = "matrix-units";
  rep.inputs = w.to_json();
  rep.tolerances["defect"] = opts.tol;
  const std::size_t k = elems.size();
  std::vector<int> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = need_row(w, elems[i]);

  std::vector<SparseOp> E(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) E[a * k + b] = build_E(w, elems[a], elems[b]).matrix;
  }

  Worst products, adjoints, forms;
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t y2 = 0; y2 < k; ++y2) {
        for (std::size_t z = 0; z < k; ++z) {
          SparseOp D = E[x * k + y] * E[y2 * k + z];
          if (elems[y] == elems[y2]) D -= E[x * k + z];
          const auto g =
              gated_defect(w, D, {idx[x], idx[y], idx[y2], idx[z]}, 0, 0, opts.seed);
          products.take(g, name_of(G, elems[x]) + "," + name_of(G, elems[y]) + "," +
                               name_of(G, elems[y2]) + "," + name_of(G, elems[z]));
        }
      }
      const std::string pair = name_of(G, elems[x]) + "," + name_of(G, elems[y]);
      SparseOp A = SparseOp(E[x * k + y].transpose()) - E[y * k + x];
      adjoints.take(gated_defect(w, A, {idx[x], idx[y]}, 0, 0, opts.seed), pair);

      const int n = n0_for_E(w, elems[x], elems[y]);
      if (n < 0 || n > w.max_level()) {
        throw PreconditionError("no n with (x,x), (x,y) edges of P^n for " + pair);
      }
      SparseOp F = build_E_product(w, elems[x], elems[y], n).matrix - E[x * k + y];
      forms.take(gated_defect(w, F, {idx[x], idx[y]}, 0, n, opts.seed), pair);
    }
  }
  record(rep, "E_xy E_y'z - delta E_xz", products, opts.tol);
  record(rep, "E_xy^* - E_yx", adjoints, opts.tol);
  record(rep, "V*V product form of E", forms, opts.tol);
  rep.conclude();
  return rep;
}

DiagnosticsReport unitary_and_commutation_defects(const FockWindow& w, const KernelSource& H,
                                                  const std::vector<GroupElement>& elems,
                                                  const DefectOptions& opts) {
  const auto& G = w.group();
  DiagnosticsReport rep;
  rep.name = "unitary-commutation";
  rep.inputs = w.to_json();
  rep.tolerances["defect"] = opts.tol;
  const auto N = static_cast<Eigen::Index>(w.size());
  SparseOp I(N, N);
  I.setIdentity();
  const SparseOp U = build_U(w).matrix;
  const SparseOp Ut = U.transpose();
  const auto all = w.all_rows();

  Worst uu, uut;
  uu.take(gated_defect(w, SparseOp(Ut * U) - I, all, 1, 1, opts.seed), "U*U");
  uut.take(gated_defect(w, SparseOp(U * Ut) - I, all, 1, 1, opts.seed), "UU*");
  record(rep, "U*U - I", uu, opts.tol);
  record(rep, "UU* - I", uut, opts.tol);

  std::vector<int> idx;
  for (const auto& x : elems) idx.push_back(need_row(w, x));
  const std::size_t k = elems.size();
  Worst ecomm, hcomm, ux_form, r_form, hz_form;
  for (std::size_t a = 0; a < k; ++a) {
    const auto& x = elems[a];
    const int n = n0_for_U(w, x);
    if (n < 0 || n + 1 > w.max_level()) throw PreconditionError("no n0 for the U_x product form");
    SparseOp D = build_U_x_product(w, x, n).matrix - build_U_x(w, x).matrix;
    ux_form.take(gated_defect(w, D, {idx[a]}, 0, n + 1, opts.seed), name_of(G, x));

    for (std::size_t b = 0; b < k; ++b) {
      const auto& y = elems[b];
      const std::string pair = name_of(G, x) + "," + name_of(G, y);
      const SparseOp E = build_E(w, x, y).matrix;
      ecomm.take(gated_defect(w, SparseOp(E * U) - SparseOp(U * E), {idx[a], idx[b]}, 0, 1,
                              opts.seed),
                 pair);
      const SparseOp Hxy = build_H(w, x, y, H).matrix;
      hcomm.take(gated_defect(w, SparseOp(Hxy * U) - SparseOp(U * Hxy), {idx[a], idx[b]}, 0, 1,
                              opts.seed),
                 pair);

      const int nr = w.cache().first_level(G.relative(x, y));
      if (nr >= 0 && nr <= w.max_level()) {
        SparseOp R = build_R_product(w, x, y, nr, H).matrix - build_R(w, x, y, H).matrix;
        r_form.take(gated_defect(w, R, {idx[a], idx[b]}, 0, nr, opts.seed), pair);
      }
      for (std::size_t c = 0; c < k; ++c) {
        const auto& z = elems[c];
        SparseOp Hz = build_H_z_product(w, z, x, y, H).matrix - build_H_z(w, z, x, y, H).matrix;
        hz_form.take(gated_defect(w, Hz, {idx[a], idx[b], idx[c]}, 0, 0, opts.seed),
                     name_of(G, z) + ";" + pair);
      }
    }
  }
  record(rep, "[E_xy, U]", ecomm, opts.tol);
  record(rep, "[H_xy, U]", hcomm, opts.tol);
  record(rep, "V*V product form of U_x", ux_form, opts.tol);
  record(rep, "V*W product form of R", r_form, opts.tol);
  record(rep, "ERE product form of H^(z)", hz_form, opts.tol);
  rep.conclude();
  return rep;
}

DiagnosticsReport generator_identity_defect(const FockWindow& w, const KernelSource& H, int n,
                                            const GroupElement& x, const GroupElement& y,
                                            const DefectOptions& opts) {
  const auto& G = w.group();
  const auto e = G.identity();
  DiagnosticsReport rep;
  rep.name = "generator-identity";
  rep.inputs = w.to_json();
  rep.inputs["n"] = n;
  rep.inputs["x"] = G.format(x);
  rep.inputs["y"] = G.format(y);
  rep.tolerances["defect"] = opts.tol;

  const SparseOp W = build_W(w, n, x, y, H).matrix;
  const SparseOp Ux = build_U_x(w, x).matrix;
  SparseOp rhs = build_E(w, x, e).matrix *
                 SparseOp(build_H_z(w, e, x, y, H).matrix * build_E(w, e, y).matrix);
  for (int i = 0; i < n; ++i) rhs = Ux * rhs;
  Worst d;
  d.take(gated_defect(w, W - rhs, {need_row(w, x), need_row(w, y), need_row(w, e)}, 0, n,
                      opts.seed),
         G.format(x) + "," + G.format(y));
  record(rep, "W - U_x^n E_xe H^(e) E_ey", d, opts.tol);
  rep.conclude();
  return rep;
}

DiagnosticsReport tw_defect_decay(const FockWindow& w, const KernelSource& H, double rho, int n,
                                  const GroupElement& x, const GroupElement& y) {
  const auto& G = w.group();
  const int M = w.max_level();
  const std::vector<int> ladder{M / 4, M / 2, 3 * M / 4};
  if (ladder.back() + n > M) throw PreconditionError("window too shallow for the T-W ladder");
  const int yi = need_row(w, y);
  const SparseOp D = build_T(w, n, x, y, rho).matrix - build_W(w, n, x, y, H).matrix;

  DiagnosticsReport rep;
  rep.name = "tw-decay";
  rep.inputs = w.to_json();
  rep.inputs["n"] = n;
  rep.inputs["x"] = G.format(x);
  rep.inputs["y"] = G.format(y);
  rep.inputs["rho"] = rho;
  rep.inputs["ladder"] = ladder;
  Json fibers = Json::array();
  int failures = 0, tested = 0;
  double worst_last = 0.0;
  for (std::size_t f = 0; f < w.fibers().size(); ++f) {
    std::vector<double> d;
    for (int m : ladder) {
      const int j = w.index(m, yi, static_cast<int>(f));
      if (j < 0) break;
      d.push_back(D.col(j).norm());
    }
    if (d.size() != ladder.size()) continue;
    ++tested;
    const bool dec = d[0] > d[1] && d[1] > d[2];
    if (!dec) ++failures;
    worst_last = std::max(worst_last, d.back());
    fibers.push_back({{"z", G.format(w.fibers()[f])}, {"defects", d}, {"decreasing", dec}});
  }
  rep.details["fibers"] = fibers;
  rep.details["worst_last_rung"] = worst_last;
  rep.add_flag("non-decreasing fibers", failures, 0, failures == 0 && tested > 0);
  rep.conclude("decreasing", "not decreasing");
  return rep;
}

DiagnosticsReport q0_projection_check(const FockWindow& w, const GroupElement& x,
                                      const DefectOptions& opts) {
  const auto& G = w.group();
  DiagnosticsReport rep;
  rep.name = "q0-projection";
  rep.inputs = w.to_json();
  rep.inputs["x"] = G.format(x);
  rep.tolerances["defect"] = opts.tol;
  const int xi = need_row(w, x);
  const int xf = w.fiber_of(x);
  if (xf < 0) throw PreconditionError("x must lie in the fiber ball");

  SparseOp R = build_S(w, 0, x, x).matrix;
  for (const auto& [s, v] : w.cache().step().support) {
    const auto y = G.multiply(x, s);
    if (w.row_of(y) < 0) throw PreconditionError("row ball must contain x supp(mu)");
    const SparseOp S1 = build_S(w, 1, x, y).matrix;
    R -= SparseOp(S1 * SparseOp(S1.transpose()));
  }
  const int j0 = w.index(0, xi, xf);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.size()));
  e0(j0) = 1.0;
  const double fix = (R * e0 - e0).norm();
  rep.add("R e_(x,x)^(0) - e_(x,x)^(0)", fix, opts.tol);

  std::vector<char> keep(w.size(), 0);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (static_cast<int>(j) == j0 || w.at(j).level > w.interior_top()) continue;
    keep[j] = 1;
    ++cols;
  }
  const SparseOp rest = keep_columns(R, keep);
  rep.add("R on the other interior vectors", norm_bound(rest), opts.tol);
  rep.details["columns"] = cols;
  rep.details["power_norm"] = power_norm(rest, opts.seed);
  rep.conclude();
  return rep;
}

DiagnosticsReport subproduct_coisometry_check(const PowersCache& cache, int n, int m, int x_radius,
                                              int z_radius, double tol) {
  if (n < 0 || m < 0 || n + m > cache.depth()) throw InvalidArgument("n + m exceeds the cache");
  const auto& G = cache.group();
  const auto xs = G.ball(x_radius);
  const auto zs = G.ball(z_radius);
  const auto supp = support_of(cache, n);

  std::vector<std::pair<int, int>> codomain;
  std::vector<double> lxz;
  std::vector<Triplet> t;
  int domain = 0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t c = 0; c < zs.size(); ++c) {
      const double l = cache.log_value(n + m, G.relative(xs[a], zs[c]));
      if (l == kNegInf) continue;
      const int row = static_cast<int>(codomain.size());
      codomain.emplace_back(static_cast<int>(a), static_cast<int>(c));
      for (const auto& s : supp) {
        const auto y = G.multiply(xs[a], s);
        const double lyz = cache.log_value(m, G.relative(y, zs[c]));
        if (lyz == kNegInf) continue;
        const double lxy = cache.log_value(n, s);
        t.emplace_back(row, domain++, std::exp(0.5 * (lxy + lyz - l)));
      }
    }
  }
  SparseOp U(static_cast<Eigen::Index>(codomain.size()), domain);
  U.setFromTriplets(t.begin(), t.end());
  SparseOp I(U.rows(), U.rows());
  I.setIdentity();
  const SparseOp D = SparseOp(U * SparseOp(U.transpose())) - I;

  DiagnosticsReport rep;
  rep.name = "subproduct-coisometry";
  rep.inputs = {{"group", G.descriptor().to_string()},
                {"n", n},
                {"m", m},
                {"x_radius", x_radius},
                {"z_radius", z_radius}};
  rep.tolerances["defect"] = tol;
  rep.add("U U^* - I", norm_bound(D), tol);
  rep.details["codomain"] = codomain.size();
  rep.details["domain"] = domain;
  rep.conclude();
  return rep;
}

DiagnosticsReport covariance_check(const FockWindow& w, const GroupElement& g,
                                   std::complex<double> zeta, int n, const GroupElement& x,
                                   const GroupElement& y, double tol) {
  const auto& G = w.group();
  if (std::abs(std::abs(zeta) - 1.0) > 1e-14) throw InvalidArgument("zeta must have modulus 1");
  DiagnosticsReport rep;
  rep.name = "covariance";
  rep.inputs = w.to_json();
  rep.inputs["g"] = G.format(g);
  rep.inputs["zeta"] = {zeta.real(), zeta.imag()};
  rep.inputs["n"] = n;
  rep.inputs["x"] = G.format(x);
  rep.inputs["y"] = G.format(y);
  rep.tolerances["defect"] = tol;

  const auto gi = G.inverse(g);
  const SparseOp S = build_S(w, n, x, y).matrix;
  const SparseOp Sg = build_S(w, n, G.multiply(g, x), G.multiply(g, y)).matrix;
  const SparseOp A =
      build_V_g(w, g).matrix * SparseOp(S * build_V_g(w, gi).matrix);

  std::vector<char> keep(w.size(), 0);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto& b = w.at(j);
    if (b.level + n > w.max_level()) continue;
    if (w.row_of(G.multiply(gi, w.rows()[b.row])) < 0) continue;
    if (w.fiber_of(G.multiply(gi, w.fibers()[b.fiber])) < 0) continue;
    keep[j] = 1;
    ++cols;
  }
  rep.add("V_g S V_g^-1 - S_(gx,gy)", norm_bound(keep_columns(SparseOp(A - Sg), keep)), tol);
  rep.details["translation_columns"] = cols;

  const ComplexOp Sc = S.cast<std::complex<double>>();
  const ComplexOp B = build_gauge(w, zeta) * ComplexOp(Sc * build_gauge(w, std::conj(zeta)));
  ComplexOp Dg = B - std::pow(zeta, n) * Sc;
  std::vector<char> gkeep(w.size(), 0);
  for (std::size_t j = 0; j < w.size(); ++j) gkeep[j] = w.at(j).level + n <= w.max_level();
  Dg.prune([&](const Eigen::Index&, const Eigen::Index& col, const std::complex<double>&) {
    return gkeep[static_cast<std::size_t>(col)] != 0;
  });
  rep.add("U_zeta S U_zeta^-1 - zeta^n S", norm_bound_impl(Dg), tol);
  rep.conclude();
  return rep;
}

QuotientNormEstimate quotient_norm_estimate(const FockWindow& w, const SparseOp& T,
                                            const std::vector<int>& fibers,
                                            double stabilize_tol, std::uint64_t seed) {
  const int M = w.max_level();
  QuotientNormEstimate q;
  q.ladder = {M / 4, M / 2, 3 * M / 4};
  if (q.ladder.back() > w.interior_top()) {
    throw PreconditionError("interior margin leaves no room for the quotient ladder");
  }
  q.value = -1.0;
  for (int f : fibers) {
    if (f < 0 || f >= static_cast<int>(w.fibers().size())) {
      throw InvalidArgument("fiber index outside the window");
    }
    std::vector<double> norms;
    for (int m : q.ladder) {
      std::vector<char> keep(w.size(), 0);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const auto& b = w.at(j);
        keep[j] = b.fiber == f && b.level >= m && b.level <= w.interior_top();
      }
      norms.push_back(power_norm(keep_columns(T, keep), seed));
    }
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    const double spread = *hi - *lo;
    q.spread = std::max(q.spread, spread);
    if (spread > stabilize_tol * std::max(1.0, *hi)) q.stabilized = false;
    if (norms.back() > q.value) {
      q.value = norms.back();
      q.argmax_fiber = f;
    }
    q.norms.push_back(std::move(norms));
  }
  if (q.value < 0.0) q.value = 0.0;
  return q;
}

}  // namespace walkbench
