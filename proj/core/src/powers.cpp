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

#include "walkbench/powers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "walkbench/errors.hpp"

namespace walkbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Mantissas below this are flushed to zero to keep subnormals out of the
// inner loops; presence is tracked separately.
constexpr double kFlush = 1e-290;

[[noreturn]] void underflow(int m, const Group& g, const GroupElement& x) {
  throw NumericalError("mantissa underflow at level " + std::to_string(m) + " for " +
                       g.format(x));
}

}  // namespace

const char* engine_name(EngineKind k) {
  switch (k) {
    case EngineKind::kGeneric: return "generic";
    case EngineKind::kLattice: return "lattice";
    case EngineKind::kRadial: return "radial";
    case EngineKind::kCartesian: return "cartesian";
  }
  return "?";
}

double PowersCache::value(int m, const GroupElement& g) const {
  double l = log_value(m, g);
  return l == kNegInf ? 0.0 : std::exp(l);
}

int PowersCache::first_level(const GroupElement& g, int from) const {
  for (int n = std::max(from, 0); n <= depth_; ++n) {
    if (present(n, g)) return n;
  }
  return -1;
}

void PowersCache::check_level(int m) const {
  if (m < 0 || m > depth_) {
    throw InvalidArgument("level " + std::to_string(m) + " outside cache depth " +
                          std::to_string(depth_));
  }
}

// ------------------------------------------------------------------ generic

GenericPowers::GenericPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu, int M,
                             const PowersOptions& opts)
    : PowersCache(std::move(group), mu, M) {
  levels_.push_back(ScaledMeasure::point_mass(*group_));
  depth_ = 0;
  std::size_t total = levels_.back().support.size();
  for (int m = 1; m <= M; ++m) {
    try {
      auto next = convolve(*group_, levels_.back(), step_, opts.support_budget);
      total += next.support.size();
      if (total > opts.total_budget) {
        truncation_reason_ = "retained support above total budget at level " + std::to_string(m);
        break;
      }
      levels_.push_back(std::move(next));
    } catch (const BudgetExceeded& e) {
      truncation_reason_ = e.what();
      break;
    }
    depth_ = m;
  }
}

GenericPowers::GenericPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu,
                             std::vector<ScaledMeasure> levels, int requested, std::string reason)
    : PowersCache(std::move(group), mu, requested), levels_(std::move(levels)) {
  if (levels_.empty()) throw InvalidArgument("restored cache has no levels");
  depth_ = static_cast<int>(levels_.size()) - 1;
  truncation_reason_ = std::move(reason);
}

const ScaledMeasure& GenericPowers::level(int m) const {
  check_level(m);
  return levels_[m];
}

bool GenericPowers::present(int m, const GroupElement& g) const {
  return level(m).contains(g);
}

double GenericPowers::log_value(int m, const GroupElement& g) const {
  return level(m).log_value(g);
}

double GenericPowers::total_mass(int m) const { return level(m).total_mass(); }

// ------------------------------------------------------------------ lattice

LatticePowers::LatticePowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu, int M,
                             const PowersOptions& opts)
    : PowersCache(std::move(group), mu, M) {
  if (group_->descriptor().family() != Family::kLattice) {
    throw DescriptorMismatch("lattice engine on " + group_->descriptor().to_string());
  }
  d_ = group_->descriptor().rank();
  int r = 0;
  for (const auto& kv : step_.support) {
    for (auto c : kv.first.code()) r = std::max<int>(r, static_cast<int>(std::llabs(c)));
  }

  auto cells = [&](int radius) {
    std::size_t n = 1;
    for (int i = 0; i < d_; ++i) n *= static_cast<std::size_t>(2 * radius + 1);
    return n;
  };
  auto crop = [&](const Level& full) {
    if (cells(full.radius) <= opts.lattice_full_keep_cells ||
        full.radius <= opts.lattice_retain_radius) {
      return full;
    }
    Level out;
    out.radius = opts.lattice_retain_radius;
    out.full_radius = full.full_radius;
    out.log_scale = full.log_scale;
    const std::size_t n = cells(out.radius);
    out.mantissa.resize(n);
    out.reach.resize(n);
    const int S = 2 * out.radius + 1;
    const int Sf = 2 * full.radius + 1;
    const int shift = full.radius - out.radius;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t rem = i, src = 0, stride = 1;
      for (int k = 0; k < d_; ++k) {
        src += (rem % S + shift) * stride;
        rem /= S;
        stride *= Sf;
      }
      out.mantissa[i] = full.mantissa[src];
      out.reach[i] = full.reach[src];
    }
    return out;
  };

  Level cur;
  cur.mantissa.assign(1, 1.0);
  cur.reach.assign(1, 1);
  levels_.push_back(cur);
  depth_ = 0;

  // Step entries as (mantissa, coordinates).
  std::vector<std::pair<double, std::vector<std::int64_t>>> steps;
  for (const auto& kv : step_.support) {
    steps.emplace_back(kv.second, std::vector<std::int64_t>(kv.first.code().begin(),
                                                            kv.first.code().end()));
  }

  for (int m = 1; m <= M; ++m) {
    Level next;
    next.radius = next.full_radius = cur.radius + r;
    const std::size_t n_next = cells(next.radius);
    if (n_next > opts.support_budget) {
      truncation_reason_ = "lattice box above support budget";
      break;
    }
    next.mantissa.assign(n_next, 0.0);
    next.reach.assign(n_next, 0);
    next.log_scale = cur.log_scale + step_.log_scale;
    const int S = 2 * cur.radius + 1;
    const int Sn = 2 * next.radius + 1;
    std::vector<std::int64_t> offsets;
    for (const auto& [p, v] : steps) {
      std::int64_t off = 0, stride = 1;
      for (int k = 0; k < d_; ++k) {
        off += (v[k] + r) * stride;
        stride *= Sn;
      }
      offsets.push_back(off);
    }
    const std::size_t n_cur = cur.mantissa.size();
    for (std::size_t i = 0; i < n_cur; ++i) {
      if (!cur.reach[i]) continue;
      std::size_t rem = i;
      std::int64_t base = 0, stride = 1;
      for (int k = 0; k < d_; ++k) {
        base += static_cast<std::int64_t>(rem % S) * stride;
        rem /= S;
        stride *= Sn;
      }
      const double a = cur.mantissa[i];
      for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto j = static_cast<std::size_t>(base + offsets[s]);
        next.mantissa[j] += a * steps[s].first;
        next.reach[j] = 1;
      }
    }
    double mx = *std::max_element(next.mantissa.begin(), next.mantissa.end());
    for (double& v : next.mantissa) {
      v /= mx;
      if (v < kFlush) v = 0.0;
    }
    next.log_scale += std::log(mx);
    levels_.back() = crop(levels_.back());
    levels_.push_back(next);
    cur = std::move(next);
    depth_ = m;
  }
}

LatticePowers::LatticePowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu,
                             std::vector<Level> levels, int requested, std::string reason)
    : PowersCache(std::move(group), mu, requested), levels_(std::move(levels)) {
  if (group_->descriptor().family() != Family::kLattice) {
    throw DescriptorMismatch("lattice engine on " + group_->descriptor().to_string());
  }
  if (levels_.empty()) throw InvalidArgument("restored cache has no levels");
  d_ = group_->descriptor().rank();
  for (const auto& lv : levels_) {
    std::size_t n = 1;
    for (int i = 0; i < d_; ++i) n *= static_cast<std::size_t>(2 * lv.radius + 1);
    if (lv.mantissa.size() != n || lv.reach.size() != n || lv.radius > lv.full_radius) {
      throw ParseError("restored lattice level has an inconsistent box");
    }
  }
  depth_ = static_cast<int>(levels_.size()) - 1;
  truncation_reason_ = std::move(reason);
}

const LatticePowers::Level& LatticePowers::level(int m) const {
  check_level(m);
  return levels_[m];
}

std::int64_t LatticePowers::index(const Level& lv, const GroupElement& g, int m) const {
  auto c = g.code();
  if (c.size() != static_cast<std::size_t>(d_)) throw DescriptorMismatch("lattice rank");
  std::int64_t idx = 0, stride = 1;
  const std::int64_t S = 2 * lv.radius + 1;
  for (int k = 0; k < d_; ++k) {
    if (std::llabs(c[k]) > lv.full_radius) return -1;
    if (std::llabs(c[k]) > lv.radius) {
      throw BudgetExceeded(group_->format(g) + " at level " + std::to_string(m) +
                           " lies outside the retained box of radius " +
                           std::to_string(lv.radius));
    }
    idx += (c[k] + lv.radius) * stride;
    stride *= S;
  }
  return idx;
}

bool LatticePowers::present(int m, const GroupElement& g) const {
  const auto& lv = level(m);
  auto i = index(lv, g, m);
  return i >= 0 && lv.reach[i];
}

double LatticePowers::log_value(int m, const GroupElement& g) const {
  const auto& lv = level(m);
  auto i = index(lv, g, m);
  if (i < 0 || !lv.reach[i]) return kNegInf;
  if (lv.mantissa[i] == 0.0) underflow(m, *group_, g);
  return std::log(lv.mantissa[i]) + lv.log_scale;
}

double LatticePowers::total_mass(int m) const {
  const auto& lv = level(m);
  if (lv.radius < lv.full_radius) {
    throw BudgetExceeded("level " + std::to_string(m) + " is only partly retained");
  }
  double s = 0.0;
  for (double v : lv.mantissa) s += v;
  return s * std::exp(lv.log_scale);
}

// ------------------------------------------------------------------- radial

RadialPowers::RadialPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu, int M,
                           const PowersOptions&)
    : PowersCache(std::move(group), mu, M) {
  const auto step = radial_reduce(*group_, step_);
  const int q = step.q;
  levels_.push_back(RadialMeasure::delta(q));
  reach_.push_back({1});
  depth_ = 0;
  for (int m = 1; m <= M; ++m) {
    auto next = radial_convolve(levels_.back(), step);
    const auto& prev_reach = reach_.back();
    const int kmax = static_cast<int>(prev_reach.size()) - 1;
    std::vector<std::uint8_t> reach(kmax + step.radius() + 1, 0);
    for (int l = 0; l <= step.radius(); ++l) {
      if (step.values[l] == 0.0) continue;
      for (int k = 0; k <= kmax; ++k) {
        if (!prev_reach[k]) continue;
        for (int n = std::abs(k - l); n <= k + l; n += 2) {
          if (tree_sphere_count(n, k, l, q) > 0) reach[n] = 1;
        }
      }
    }
    next.values.resize(reach.size(), 0.0);
    for (double& v : next.values) {
      if (v < kFlush) v = 0.0;
    }
    levels_.push_back(std::move(next));
    reach_.push_back(std::move(reach));
    depth_ = m;
  }
}

RadialPowers::RadialPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu,
                           std::vector<RadialMeasure> levels,
                           std::vector<std::vector<std::uint8_t>> reach, int requested,
                           std::string reason)
    : PowersCache(std::move(group), mu, requested),
      levels_(std::move(levels)),
      reach_(std::move(reach)) {
  if (group_->descriptor().family() != Family::kFree) {
    throw DescriptorMismatch("radial engine on " + group_->descriptor().to_string());
  }
  if (levels_.empty() || levels_.size() != reach_.size()) {
    throw ParseError("restored radial cache is inconsistent");
  }
  for (std::size_t m = 0; m < levels_.size(); ++m) {
    if (levels_[m].values.size() != reach_[m].size()) {
      throw ParseError("restored radial level " + std::to_string(m) + " is inconsistent");
    }
  }
  depth_ = static_cast<int>(levels_.size()) - 1;
  truncation_reason_ = std::move(reason);
}

const std::vector<std::uint8_t>& RadialPowers::reach(int m) const {
  check_level(m);
  return reach_[m];
}

const RadialMeasure& RadialPowers::level(int m) const {
  check_level(m);
  return levels_[m];
}

bool RadialPowers::present_at(int m, int d) const {
  check_level(m);
  return d >= 0 && d < static_cast<int>(reach_[m].size()) && reach_[m][d];
}

double RadialPowers::log_value_at(int m, int d) const {
  if (!present_at(m, d)) return kNegInf;
  double v = levels_[m].values[d];
  if (v == 0.0) {
    throw NumericalError("mantissa underflow at level " + std::to_string(m) + ", radius " +
                         std::to_string(d));
  }
  return std::log(v) + levels_[m].log_scale;
}

bool RadialPowers::present(int m, const GroupElement& g) const {
  return present_at(m, static_cast<int>(free_length(g)));
}

double RadialPowers::log_value(int m, const GroupElement& g) const {
  return log_value_at(m, static_cast<int>(free_length(g)));
}

double RadialPowers::total_mass(int m) const {
  const auto& lv = level(m);
  double s = 0.0;
  for (int d = 0; d <= lv.radius(); ++d) s += lv.values[d] * tree_sphere_size(d, lv.q);
  return s * std::exp(lv.log_scale);
}

// ---------------------------------------------------------------- cartesian

CartesianPowers::CartesianPowers(std::shared_ptr<const Group> group,
                                 std::shared_ptr<const PowersCache> left,
                                 std::shared_ptr<const PowersCache> right, double p_left)
    : PowersCache(std::move(group), ScaledMeasure(), std::min(left->requested_depth(),
                                                              right->requested_depth())),
      left_(std::move(left)),
      right_(std::move(right)),
      p_(p_left) {
  if (group_->descriptor().family() != Family::kProduct) {
    throw DescriptorMismatch("cartesian engine needs a product group");
  }
  if (!(p_ > 0.0 && p_ < 1.0)) throw InvalidArgument("mixing weight must lie in (0,1)");
  std::vector<std::pair<GroupElement, double>> entries;
  const auto& G = *group_;
  for (const auto& [g, a] : left_->step().support) {
    entries.emplace_back(G.pair(g, G.right().identity()),
                         p_ * a * std::exp(left_->step().log_scale));
  }
  for (const auto& [h, b] : right_->step().support) {
    entries.emplace_back(G.pair(G.left().identity(), h),
                         (1 - p_) * b * std::exp(right_->step().log_scale));
  }
  step_ = ScaledMeasure::from_probabilities(entries);
  depth_ = std::min(left_->depth(), right_->depth());
  if (left_->truncated() || right_->truncated()) truncation_reason_ = "component truncated";
  lbinom_.resize(static_cast<std::size_t>(depth_ + 1) * (depth_ + 2) / 2);
  for (int m = 0; m <= depth_; ++m) {
    for (int k = 0; k <= m; ++k) {
      lbinom_[static_cast<std::size_t>(m) * (m + 1) / 2 + k] =
          std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
    }
  }
}

const std::vector<double>& CartesianPowers::column(const GroupElement& g) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(g);
    if (it != memo_.end()) return it->second;
  }
  auto [w, v] = group_->split(g);
  std::vector<double> l1(depth_ + 1), l2(depth_ + 1);
  for (int k = 0; k <= depth_; ++k) {
    l1[k] = left_->log_value(k, w);
    l2[k] = right_->log_value(k, v);
  }
  const double lp = std::log(p_), lq = std::log1p(-p_);
  std::vector<double> col(depth_ + 1, kNegInf);
  std::vector<double> terms;
  for (int m = 0; m <= depth_; ++m) {
    terms.clear();
    double mx = kNegInf;
    for (int k = 0; k <= m; ++k) {
      if (l1[k] == kNegInf || l2[m - k] == kNegInf) continue;
      double t = lbinom_[static_cast<std::size_t>(m) * (m + 1) / 2 + k] + k * lp +
                 (m - k) * lq + l1[k] + l2[m - k];
      terms.push_back(t);
      mx = std::max(mx, t);
    }
    if (terms.empty()) continue;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - mx);
    col[m] = mx + std::log(s);
  }
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.emplace(g, std::move(col)).first->second;
}

bool CartesianPowers::present(int m, const GroupElement& g) const {
  check_level(m);
  return column(g)[m] != kNegInf;
}

double CartesianPowers::log_value(int m, const GroupElement& g) const {
  check_level(m);
  return column(g)[m];
}

double CartesianPowers::total_mass(int m) const {
  check_level(m);
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    s += std::exp(lbinom_[static_cast<std::size_t>(m) * (m + 1) / 2 + k] + k * std::log(p_) +
                  (m - k) * std::log1p(-p_)) *
         left_->total_mass(k) * right_->total_mass(m - k);
  }
  return s;
}

// ------------------------------------------------------------------ factory

namespace {

bool is_isotropic(const Group& g, const ScaledMeasure& mu) {
  try {
    radial_reduce(g, mu);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

}  // namespace

std::shared_ptr<const PowersCache> build_powers(std::shared_ptr<const Group> group,
                                                const ScaledMeasure& mu, int M,
                                                EngineChoice choice, const PowersOptions& opts) {
  if (M < 0) throw InvalidArgument("negative depth");
  const auto fam = group->descriptor().family();
  switch (choice) {
    case EngineChoice::kGeneric:
      return std::make_shared<GenericPowers>(group, mu, M, opts);
    case EngineChoice::kLattice:
      return std::make_shared<LatticePowers>(group, mu, M, opts);
    case EngineChoice::kRadial:
      return std::make_shared<RadialPowers>(group, mu, M, opts);
    case EngineChoice::kAuto:
      break;
  }
  if (fam == Family::kLattice) return std::make_shared<LatticePowers>(group, mu, M, opts);
  if (fam == Family::kFree && is_isotropic(*group, mu)) {
    return std::make_shared<RadialPowers>(group, mu, M, opts);
  }
  if (fam == Family::kProduct) {
    // Axis-supported measures split as a Cartesian mixture; the mass at
    // (e,e) is assigned to the left factor.
    const auto& L = group->left();
    const auto& R = group->right();
    std::vector<std::pair<GroupElement, double>> left, right;
    double p = 0.0;
    bool axis = true;
    for (const auto& [g, a] : mu.support) {
      auto [w, v] = group->split(g);
      double prob = a * std::exp(mu.log_scale);
      if (R.is_identity(v)) {
        left.emplace_back(w, prob);
        p += prob;
      } else if (L.is_identity(w)) {
        right.emplace_back(v, prob);
      } else {
        axis = false;
        break;
      }
    }
    if (axis && p > 0.0 && p < 1.0) {
      for (auto& e : left) e.second /= p;
      for (auto& e : right) e.second /= (1 - p);
      auto lc = build_powers(group->left_ptr(), ScaledMeasure::from_probabilities(left), M,
                             EngineChoice::kAuto, opts);
      auto rc = build_powers(group->right_ptr(), ScaledMeasure::from_probabilities(right), M,
                             EngineChoice::kAuto, opts);
      return std::make_shared<CartesianPowers>(group, lc, rc, p);
    }
  }
  return std::make_shared<GenericPowers>(group, mu, M, opts);
}

double transition(const PowersCache& cache, int n, const GroupElement& x, const GroupElement& y) {
  return cache.value(n, cache.group().relative(x, y));
}

double log_transition(const PowersCache& cache, int n, const GroupElement& x,
                      const GroupElement& y) {
  return cache.log_value(n, cache.group().relative(x, y));
}

PeriodReport is_aperiodic(const PowersCache& cache) {
  PeriodReport rep;
  const auto e = cache.group().identity();
  int g = 0;
  for (int n = 1; n <= cache.depth() && g != 1; ++n) {
    if (cache.present(n, e)) g = std::gcd(g, n);
  }
  rep.period = g;
  rep.conclusive = g > 0;
  rep.aperiodic = g == 1;
  return rep;
}

}  // namespace walkbench
