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

#include "walkbench/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "walkbench/errors.hpp"

namespace walkbench {

SpectralEstimate spectral_radius(const PowersCache& cache, const AccelerationOptions& opts) {
  const auto per = is_aperiodic(cache);
  if (!per.conclusive) {
    throw PreconditionError("no return to e up to depth " + std::to_string(cache.depth()) +
                            "; spectral radius undetermined");
  }
  const int p = per.period;
  const auto e = cache.group().identity();
  const int last = ((cache.depth() - p) / p) * p;
  if (last < p) throw PreconditionError("cache too shallow for the spectral radius");

  int m_min = last;
  while (m_min - p >= p && cache.present(m_min - p, e)) m_min -= p;

  auto seq = [&](int m) {
    return (cache.log_value(m + p, e) - cache.log_value(m, e)) / p;
  };
  auto o = opts;
  o.stride = p;
  SpectralEstimate est;
  est.period = p;
  est.tail = accelerate_log_tail(seq, m_min, last, o);
  est.rho_hat = std::min(1.0, est.tail.estimate);
  est.m_lo = est.tail.m0;
  est.m_hi = last + p;
  est.spread = std::min(1.0, est.tail.hi) - std::min(1.0, est.tail.lo);
  if (est.tail.raw_oscillation == 0.0 && est.tail.lo == est.tail.hi) {
    est.method = "exact";
  } else if (!est.tail.accelerated) {
    est.method = "successive-ratio";
  } else if (p == 1) {
    est.method = "extrapolated";
  } else if (p == 2) {
    est.method = "even-subsequence";
  } else {
    est.method = "period-subsequence";
  }
  return est;
}

LocalLimitFit fit_local_limit_exponent(const PowersCache& cache, double rho_hat) {
  const auto e = cache.group().identity();
  const int M = cache.depth();
  std::vector<int> ms;
  for (int m = std::max(1, M / 2); m <= M; ++m) {
    if (cache.present(m, e)) ms.push_back(m);
  }
  if (ms.size() < 4) throw PreconditionError("too few return levels to fit an exponent");
  Eigen::MatrixXd A(ms.size(), 3);
  Eigen::VectorXd b(ms.size());
  const double lr = std::log(rho_hat);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double m = ms[i];
    A(i, 0) = 1.0;
    A(i, 1) = -std::log(m);
    A(i, 2) = 1.0 / m;
    b(i) = cache.log_value(ms[i], e) - m * lr;
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  LocalLimitFit fit;
  fit.alpha = c(1);
  fit.rms = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(ms.size()));
  fit.m_lo = ms.front();
  fit.m_hi = ms.back();
  return fit;
}

SpectralContext analyze_spectrum(const PowersCache& cache, const AccelerationOptions& opts) {
  SpectralContext ctx;
  ctx.rho = spectral_radius(cache, opts);
  ctx.fit = fit_local_limit_exponent(cache, ctx.rho.rho_hat);
  return ctx;
}

GreenValue green(const PowersCache& cache, const SpectralContext& ctx, const GroupElement& x,
                 const GroupElement& y, double z, int terms) {
  if (z < 0) throw InvalidArgument("green: z must be nonnegative");
  const int N = terms < 0 ? cache.depth() : std::min(terms, cache.depth());
  const auto a = cache.group().relative(x, y);
  GreenValue g;
  g.z = z;
  g.terms_used = N + 1;
  if (z == 0.0) {
    g.value = cache.present(0, a) ? 1.0 : 0.0;
    return g;
  }
  const double lz = std::log(z);
  double last = 0.0;
  int n_last = -1;
  for (int n = 0; n <= N; ++n) {
    const double l = cache.log_value(n, a);
    if (l == -std::numeric_limits<double>::infinity()) continue;
    last = std::exp(l + n * lz);
    g.value += last;
    n_last = n;
  }
  if (n_last < 0) {
    g.reliable = false;
    return g;
  }
  const int p = std::max(1, ctx.rho.period);
  const double q = z * ctx.rho.rho_hat;
  const double inf = std::numeric_limits<double>::infinity();
  double geometric = inf;
  if (q < 1.0) {
    const double r = std::pow(q, p);
    geometric = last * r / (1.0 - r);
  }
  const double alpha = ctx.fit.alpha;
  if (alpha > 1.0 && n_last > 0) {
    // Terms decay like n^-alpha at the radius of convergence.
    const double poly = last * n_last / (p * (alpha - 1.0));
    if (poly < geometric) {
      g.tail_estimate = poly;
      g.truncation_bound = 2.0 * poly;
      return g;
    }
  }
  g.tail_estimate = geometric;
  g.truncation_bound = geometric;
  g.reliable = std::isfinite(geometric);
  return g;
}

KernelEntry martin_kernel(const PowersCache& cache, const SpectralContext& ctx,
                          const GroupElement& x, const GroupElement& y,
                          const MartinOptions& opts) {
  const auto& G = cache.group();
  if (G.is_identity(x)) return KernelEntry::exact(1.0);
  const auto e = G.identity();
  KernelEntry out;
  out.M = cache.depth();
  if (ctx.fit.alpha > opts.direct_alpha_threshold) {
    const double z = 1.0 / ctx.rho.rho_hat;
    auto gx = green(cache, ctx, x, y, z);
    auto ge = green(cache, ctx, e, y, z);
    if (ge.value <= 0.0) throw CoverageGap("y never reached from e within the cache");
    out.estimate = (gx.value + gx.tail_estimate) / (ge.value + ge.tail_estimate);
    out.lo = gx.value / (ge.value + ge.truncation_bound);
    out.hi = (gx.value + gx.truncation_bound) / ge.value;
    out.raw = gx.value / ge.value;
    out.method = "martin-radius";
    out.accelerated = true;
    return out;
  }
  std::vector<double> rungs;
  for (int k = opts.ladder_first; k <= opts.ladder_last; ++k) {
    const double z = (1.0 - std::ldexp(1.0, -k)) / ctx.rho.rho_hat;
    auto gx = green(cache, ctx, x, y, z);
    auto ge = green(cache, ctx, e, y, z);
    if (ge.value <= 0.0) throw CoverageGap("y never reached from e within the cache");
    const bool ok = gx.reliable && ge.reliable &&
                    gx.truncation_bound <= opts.ladder_tail_tolerance * gx.value &&
                    ge.truncation_bound <= opts.ladder_tail_tolerance * ge.value;
    if (!ok) break;
    rungs.push_back((gx.value + gx.tail_estimate) / (ge.value + ge.tail_estimate));
  }
  if (rungs.empty()) throw NumericalError("Martin ladder has no converged rung");
  out.raw = rungs.back();
  out.method = "martin-ladder";
  const std::size_t n = rungs.size();
  if (n >= 3) {
    out.estimate = aitken_delta2(rungs[n - 3], rungs[n - 2], rungs[n - 1]);
    out.accelerated = true;
  } else {
    out.estimate = rungs.back();
  }
  out.lo = out.hi = out.estimate;
  for (std::size_t i = n >= 3 ? n - 3 : 0; i < n; ++i) {
    out.lo = std::min(out.lo, rungs[i]);
    out.hi = std::max(out.hi, rungs[i]);
  }
  return out;
}

MartinKernel::MartinKernel(std::shared_ptr<const PowersCache> cache, SpectralContext ctx,
                           MartinOptions opts)
    : KernelSource(cache->group_ptr()),
      cache_(std::move(cache)),
      ctx_(std::move(ctx)),
      opts_(opts) {}

KernelEntry MartinKernel::entry(const GroupElement& x, const GroupElement& y) const {
  return martin_kernel(*cache_, ctx_, x, y, opts_);
}

MetricValue martin_metric(const KernelSource& K, const std::vector<GroupElement>& prefix,
                          const GroupElement& j1, const GroupElement& j2, const Normalizer& C) {
  if (std::find(prefix.begin(), prefix.end(), j1) == prefix.end() ||
      std::find(prefix.begin(), prefix.end(), j2) == prefix.end()) {
    throw CoverageGap("metric arguments must lie in the enumeration prefix");
  }
  MetricValue d;
  double w = 1.0;  // 2^-phi(i)
  for (const auto& i : prefix) {
    const double c = C(i);
    if (j1 != j2) {
      auto a = K.entry(i, j1);
      auto b = K.entry(i, j2);
      const double delta = (i == j1 ? 1.0 : 0.0) - (i == j2 ? 1.0 : 0.0);
      d.value += (std::abs(a.estimate - b.estimate) + std::abs(delta)) * w / c;
      d.uncertainty += (a.uncertainty() + b.uncertainty()) * w / c;
    }
    w *= 0.5;
    ++d.terms;
  }
  d.tail_bound = j1 == j2 ? 0.0 : 2.0 * w;
  return d;
}

}  // namespace walkbench
