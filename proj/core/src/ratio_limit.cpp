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

#include "walkbench/ratio_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include "walkbench/errors.hpp"

namespace walkbench {
namespace {

void require_aperiodic(const PowersCache& cache) {
  auto per = is_aperiodic(cache);
  if (!per.conclusive) {
    throw PreconditionError("no return to e within the cache; aperiodicity undetermined");
  }
  if (!per.aperiodic) throw AperiodicityRequired(per.period);
}

KernelEntry estimate_unchecked(const PowersCache& cache, const GroupElement& x,
                               const GroupElement& y, const AccelerationOptions& opts) {
  const auto& G = cache.group();
  if (G.is_identity(x)) return KernelEntry::exact(1.0);
  const auto a = G.relative(x, y);
  const int M = cache.depth();
  if (!cache.present(M, a) || !cache.present(M, y)) {
    throw CoverageGap("(" + G.format(x) + ", " + G.format(y) + ") not reached at level " +
                      std::to_string(M));
  }
  int m_min = M;
  while (m_min > 1 && cache.present(m_min - 1, a) && cache.present(m_min - 1, y)) --m_min;
  auto seq = [&](int m) { return cache.log_value(m, a) - cache.log_value(m, y); };
  auto t = accelerate_log_tail(seq, m_min, M, opts);
  KernelEntry e;
  e.estimate = t.estimate;
  e.lo = t.lo;
  e.hi = t.hi;
  e.m0 = t.m0;
  e.M = t.M;
  e.accelerated = t.accelerated;
  e.method = accelerator_name(t.method);
  e.raw = t.raw;
  return e;
}

}  // namespace

RatioSequence ratio_sequence(const PowersCache& cache, const GroupElement& x,
                             const GroupElement& y) {
  require_aperiodic(cache);
  const auto a = cache.group().relative(x, y);
  RatioSequence s;
  for (int m = 0; m <= cache.depth(); ++m) {
    const bool den = cache.present(m, y);
    if (!den) {
      s.gaps.push_back(m);
      s.first_full = -1;
      continue;
    }
    if (!cache.present(m, a)) {
      // Numerator absent: r_m = 0, which is a legitimate value.
      s.ms.push_back(m);
      s.values.push_back(0.0);
      if (s.first_full < 0) s.first_full = m;
      continue;
    }
    s.ms.push_back(m);
    s.values.push_back(std::exp(cache.log_value(m, a) - cache.log_value(m, y)));
    if (s.first_full < 0) s.first_full = m;
  }
  if (s.ms.empty()) throw CoverageGap("y never reached within the cache");
  return s;
}

KernelEntry estimate_H(const PowersCache& cache, const GroupElement& x, const GroupElement& y,
                       const AccelerationOptions& opts) {
  require_aperiodic(cache);
  return estimate_unchecked(cache, x, y, opts);
}

RatioKernel::RatioKernel(std::shared_ptr<const PowersCache> cache, AccelerationOptions opts)
    : KernelSource(cache->group_ptr()), cache_(std::move(cache)), opts_(opts) {
  require_aperiodic(*cache_);
}

KernelEntry RatioKernel::entry(const GroupElement& x, const GroupElement& y) const {
  KernelKey key{group_->relative(x, y), y};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  auto e = estimate_unchecked(*cache_, x, y, opts_);
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.emplace(std::move(key), std::move(e)).first->second;
}

double closed_form_H_free_isotropic(int s, long dxy, long dey) {
  const double c = (s - 1.0) / s;
  return (1.0 + c * dxy) / (1.0 + c * dey) *
         std::pow(2.0 * s - 1.0, 0.5 * static_cast<double>(dey - dxy));
}

double closed_form_H_free_isotropic(const Group& g, const GroupElement& x, const GroupElement& y) {
  if (g.descriptor().family() != Family::kFree) {
    throw DescriptorMismatch("closed form needs a free group");
  }
  return closed_form_H_free_isotropic(g.descriptor().rank(), free_length(g.relative(x, y)),
                                      free_length(y));
}

ClosedFormFreeKernel::ClosedFormFreeKernel(std::shared_ptr<const Group> group)
    : KernelSource(std::move(group)) {
  if (group_->descriptor().family() != Family::kFree) {
    throw DescriptorMismatch("closed form needs a free group");
  }
}

KernelEntry ClosedFormFreeKernel::entry(const GroupElement& x, const GroupElement& y) const {
  return KernelEntry::exact(closed_form_H_free_isotropic(*group_, x, y), "closed-form");
}

double free_boundary_limit(const Group& g, const GroupElement& x, std::int64_t letter) {
  const int s = g.descriptor().rank();
  const auto K = free_length(x) + 2;
  std::vector<std::int64_t> ray(K, letter);
  const auto y = g.word(ray);
  const double b = static_cast<double>(free_length(g.relative(x, y)) - K);
  return std::pow(2.0 * s - 1.0, -0.5 * b);
}

BoundConstants bound_constants(const PowersCache& cache, double rho_hat, const GroupElement& x) {
  BoundConstants b;
  const auto& G = cache.group();
  b.n = cache.first_level(x);
  b.n_prime = cache.first_level(G.inverse(x));
  if (b.n < 0 || b.n_prime < 0) {
    throw CoverageGap(G.format(x) + " not reached within depth " + std::to_string(cache.depth()));
  }
  const double lr = std::log(rho_hat);
  b.C = std::exp(b.n * lr - cache.log_value(b.n, x));
  b.c = std::exp(cache.log_value(b.n_prime, G.inverse(x)) - b.n_prime * lr);
  return b;
}

DiagnosticsReport srlp_diagnostic(const PowersCache& cache, int ball_radius, double tol,
                                  const AccelerationOptions& opts) {
  require_aperiodic(cache);
  const auto& G = cache.group();
  auto ball = G.ball(ball_radius);
  DiagnosticsReport rep;
  rep.name = "srlp";
  rep.inputs = {{"group", G.descriptor().to_string()}, {"ball_radius", ball_radius}};
  rep.tolerances = {{"oscillation", tol}};
  rep.provenance = {{"M", cache.depth()},
                    {"engine", engine_name(cache.kind())},
                    {"acceleration", accelerator_name(opts.method)}};
  double worst = 0.0;
  Json offenders = Json::array();
  for (const auto& x : ball) {
    for (const auto& y : ball) {
      auto e = estimate_unchecked(cache, x, y, AccelerationOptions{Accelerator::kNone});
      const double osc = e.hi - e.lo;
      worst = std::max(worst, osc);
      if (osc > tol) offenders.push_back({{"x", G.format(x)}, {"y", G.format(y)}, {"osc", osc}});
    }
  }
  rep.add("max tail oscillation", worst, tol);
  rep.details["offenders"] = offenders;
  rep.details["pairs"] = ball.size() * ball.size();
  rep.verdict = offenders.empty() ? "consistent with SRLP at tol " + format_double(tol)
                                  : std::to_string(offenders.size()) + " offending pairs";
  return rep;
}

Json RadicalReport::to_json(const Group& g) const {
  Json j;
  j["tested_radius"] = tested_radius;
  j["probe_radius"] = probe_radius;
  j["tolerance"] = tolerance;
  Json f = Json::array();
  for (const auto& y : flagged) f.push_back(g.format(y));
  j["flagged"] = f;
  j["flagged_count"] = flagged.size();
  j["deviation"] = deviation;
  j["product_closure"] = product_closure;
  j["inverse_closure"] = inverse_closure;
  j["closure_ok"] = closure_ok;
  return j;
}

RadicalReport detect_radical(const KernelSource& H, int ball_radius, int probe_radius,
                             double tol) {
  const auto& G = H.group();
  const auto ball = G.ball(ball_radius);
  const auto probe = G.ball(probe_radius);
  const auto e = G.identity();
  RadicalReport rep;
  rep.tested_radius = ball_radius;
  rep.probe_radius = probe_radius;
  rep.tolerance = tol;

  auto threshold = [&](const KernelEntry& a, const KernelEntry& b) {
    return tol >= 0 ? tol : 3.0 * (a.uncertainty() + b.uncertainty());
  };
  // Largest deviation of column y from column e and whether it stays
  // inside the per-pair threshold everywhere.
  auto column_test = [&](const GroupElement& y, double scale) {
    double dev = 0.0;
    bool ok = true;
    for (const auto& x : probe) {
      auto a = H.entry(x, y);
      auto b = H.entry(x, e);
      const double d = std::abs(a.estimate - b.estimate);
      dev = std::max(dev, d);
      if (d > scale * threshold(a, b)) ok = false;
    }
    return std::make_pair(dev, ok);
  };

  for (const auto& y : ball) {
    auto [dev, ok] = column_test(y, 1.0);
    rep.deviation.push_back(dev);
    if (ok || G.is_identity(y)) rep.flagged.push_back(y);
  }

  std::unordered_set<GroupElement, GroupElementHash> in_ball(ball.begin(), ball.end());
  for (const auto& y : rep.flagged) {
    auto yi = G.inverse(y);
    if (in_ball.count(yi)) {
      auto [dev, ok] = column_test(yi, 3.0);
      rep.inverse_closure = std::max(rep.inverse_closure, dev);
      rep.closure_ok = rep.closure_ok && ok;
    }
    for (const auto& z : rep.flagged) {
      auto yz = G.multiply(y, z);
      if (!in_ball.count(yz)) continue;
      auto [dev, ok] = column_test(yz, 3.0);
      rep.product_closure = std::max(rep.product_closure, dev);
      rep.closure_ok = rep.closure_ok && ok;
    }
  }
  return rep;
}

MetricValue ratio_metric(const KernelSource& H, const std::vector<GroupElement>& prefix,
                         const GroupElement& y, const GroupElement& z, const Normalizer& C) {
  MetricValue d;
  double w = 1.0;
  for (const auto& x : prefix) {
    if (y != z) {
      auto a = H.entry(x, y);
      auto b = H.entry(x, z);
      const double c = C(x);
      d.value += std::abs(a.estimate - b.estimate) * w / c;
      d.uncertainty += (a.uncertainty() + b.uncertainty()) * w / c;
    }
    w *= 0.5;
    ++d.terms;
  }
  d.tail_bound = y == z ? 0.0 : 2.0 * w;
  return d;
}

DiagnosticsReport boundary_trace(const KernelSource& H, const std::vector<GroupElement>& xs,
                                 const std::vector<GroupElement>& sequence, const Normalizer& C,
                                 const TraceOptions& opts) {
  const auto& G = H.group();
  DiagnosticsReport rep;
  rep.name = "boundary_trace";
  Json seq = Json::array();
  for (const auto& y : sequence) seq.push_back(G.format(y));
  rep.inputs = {{"sequence", seq}, {"metric_radius", opts.metric_radius}};
  rep.tolerances = {{"cauchy", opts.tol}};
  rep.provenance = {{"kernel", H.name()}};

  Json traces = Json::array();
  for (const auto& x : xs) {
    Json row = Json::array();
    for (const auto& y : sequence) row.push_back(H(x, y));
    traces.push_back({{"x", G.format(x)}, {"values", row}, {"limit", row.back()}});
  }
  rep.details["traces"] = traces;

  const auto prefix = G.ball(opts.metric_radius);
  double worst = 0.0;
  Json steps = Json::array();
  for (std::size_t k = 0; k + 1 < sequence.size(); ++k) {
    auto d = ratio_metric(H, prefix, sequence[k], sequence[k + 1], C);
    const double r = d.value + d.tail_bound;
    worst = std::max(worst, r);
    steps.push_back({{"k", k}, {"distance", d.value}, {"tail_bound", d.tail_bound},
                     {"uncertainty", d.uncertainty}});
  }
  double diameter = 0.0;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    for (std::size_t l = k + 1; l < sequence.size(); ++l) {
      auto d = ratio_metric(H, prefix, sequence[k], sequence[l], C);
      diameter = std::max(diameter, d.value + d.tail_bound);
    }
  }
  rep.details["consecutive"] = steps;
  rep.details["diameter"] = diameter;
  rep.add("max consecutive distance", worst, opts.tol);
  rep.verdict = rep.passed() ? "converging" : "not Cauchy";
  return rep;
}

CheckValue cocycle_check(const KernelSource& H, const GroupElement& g, const GroupElement& x,
                         const GroupElement& y) {
  const auto& G = H.group();
  const auto gi = G.inverse(g);
  auto a = H.entry(x, G.multiply(g, y));
  auto b = H.entry(gi, y);
  auto c = H.entry(G.multiply(gi, x), y);
  CheckValue v;
  v.residual = std::abs(a.estimate * b.estimate - c.estimate);
  v.uncertainty = a.uncertainty() * b.estimate + a.estimate * b.uncertainty() + c.uncertainty();
  return v;
}

CheckValue rho_harmonicity_check(const KernelSource& H, const PowersCache& cache,
                                 const SpectralEstimate& rho, const GroupElement& x,
                                 const GroupElement& y) {
  const auto& G = H.group();
  const auto& mu = cache.step();
  const double scale = std::exp(mu.log_scale);
  double s = 0.0, u = 0.0;
  for (const auto& [step, a] : mu.support) {
    auto e = H.entry(G.multiply(x, step), y);
    s += a * scale * e.estimate;
    u += a * scale * e.uncertainty();
  }
  auto h = H.entry(x, y);
  CheckValue v;
  v.residual = std::abs(s - rho.rho_hat * h.estimate);
  v.uncertainty = u + rho.rho_hat * h.uncertainty() + rho.spread * h.estimate;
  return v;
}

DiagnosticsReport martin_vs_ratio(const KernelSource& K, const KernelSource& H,
                                  const std::vector<GroupElement>& xs,
                                  const std::vector<GroupElement>& sequence, double tol) {
  const auto& G = H.group();
  DiagnosticsReport rep;
  rep.name = "martin_vs_ratio";
  rep.tolerances = {{"relative", tol}};
  rep.provenance = {{"martin", K.name()}, {"ratio", H.name()}};
  Json rows = Json::array();
  double worst = 0.0;
  for (const auto& y : sequence) {
    for (const auto& x : xs) {
      auto k = K.entry(x, y);
      auto h = H.entry(x, y);
      const double rel = std::abs(k.estimate - h.estimate) / h.estimate;
      worst = std::max(worst, rel);
      rows.push_back({{"x", G.format(x)}, {"y", G.format(y)}, {"K", k.estimate},
                      {"H", h.estimate}, {"relative", rel}});
    }
  }
  rep.details["pairs"] = rows;
  rep.add("max relative |K - H| / H", worst, tol);
  rep.conclude("agree", "disagree");
  return rep;
}

}  // namespace walkbench
