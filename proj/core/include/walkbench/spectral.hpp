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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "walkbench/acceleration.hpp"
#include "walkbench/kernel.hpp"
#include "walkbench/powers.hpp"

namespace walkbench {

struct SpectralEstimate {
  double rho_hat = 0.0;
  /// "extrapolated", "successive-ratio", "even-subsequence",
  /// "period-subsequence" or "exact".
  std::string method;
  int m_lo = 0;
  int m_hi = 0;
  double spread = 0.0;
  int period = 1;
  TailEstimate tail;
};

/// rho from return-probability ratios mu^{*(m+p)}(e) / mu^{*m}(e), p the
/// period, extrapolated in 1/m and clamped to (0, 1].
SpectralEstimate spectral_radius(const PowersCache& cache, const AccelerationOptions& opts = {});

struct LocalLimitFit {
  double alpha = 0.0;
  double rms = 0.0;
  int m_lo = 0;
  int m_hi = 0;
};

/// Least-squares fit of log(mu^{*m}(e) rho^{-m}) = c - alpha log m + b/m
/// over the upper half of the cache.
LocalLimitFit fit_local_limit_exponent(const PowersCache& cache, double rho_hat);

/// Spectral data shared by the Green-function routines.
struct SpectralContext {
  SpectralEstimate rho;
  LocalLimitFit fit;
};
SpectralContext analyze_spectrum(const PowersCache& cache, const AccelerationOptions& opts = {});

struct GreenValue {
  double value = 0.0;  // partial sum
  double truncation_bound = 0.0;
  double tail_estimate = 0.0;
  int terms_used = 0;
  double z = 0.0;
  bool reliable = true;
};

/// Partial sum of G(x, y | z) = sum_n mu^{*n}(x^-1 y) z^n with n <= terms
/// (default: the whole cache) and a tail model from rho and alpha.
GreenValue green(const PowersCache& cache, const SpectralContext& ctx, const GroupElement& x,
                 const GroupElement& y, double z, int terms = -1);

struct MartinOptions {
  /// Evaluate at z = 1/rho when the fitted exponent exceeds this.
  double direct_alpha_threshold = 1.0;
  int ladder_first = 3;
  int ladder_last = 14;
  /// Relative tail size above which a ladder rung is discarded.
  double ladder_tail_tolerance = 1e-6;
};

/// rho-Martin kernel K(x, y) = lim G(x,y|z) / G(e,y|z), z -> 1/rho.
KernelEntry martin_kernel(const PowersCache& cache, const SpectralContext& ctx,
                          const GroupElement& x, const GroupElement& y,
                          const MartinOptions& opts = {});

class MartinKernel final : public KernelSource {
 public:
  MartinKernel(std::shared_ptr<const PowersCache> cache, SpectralContext ctx,
               MartinOptions opts = {});
  KernelEntry entry(const GroupElement& x, const GroupElement& y) const override;
  std::string name() const override { return "martin"; }
  const SpectralContext& context() const { return ctx_; }

 private:
  std::shared_ptr<const PowersCache> cache_;
  SpectralContext ctx_;
  MartinOptions opts_;
};

struct MetricValue {
  double value = 0.0;       // truncated sum
  double tail_bound = 0.0;  // bound on the omitted terms
  double uncertainty = 0.0; // propagated kernel uncertainty
  int terms = 0;
};

/// Normaliser C_i of the metric sums.
using Normalizer = std::function<double(const GroupElement&)>;

/// Martin metric over the phi-prefix `prefix`:
///   sum_i (|K(i,j1) - K(i,j2)| + |delta_{i j1} - delta_{i j2}|) / (C_i 2^phi(i)).
MetricValue martin_metric(const KernelSource& K, const std::vector<GroupElement>& prefix,
                          const GroupElement& j1, const GroupElement& j2, const Normalizer& C);

}  // namespace walkbench
