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

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "walkbench/acceleration.hpp"
#include "walkbench/diagnostics.hpp"
#include "walkbench/kernel.hpp"
#include "walkbench/powers.hpp"
#include "walkbench/spectral.hpp"

namespace walkbench {

struct RatioSequence {
  /// Levels at which both numerator and denominator are present.
  std::vector<int> ms;
  std::vector<double> values;
  /// Levels in [0, M] where the denominator is absent.
  std::vector<int> gaps;
  /// First level from which the sequence is defined without gaps.
  int first_full = -1;
};

/// r_m = mu^{*m}(x^-1 y) / mu^{*m}(y). Throws AperiodicityRequired for
/// periodic walks and CoverageGap if y is never reached.
RatioSequence ratio_sequence(const PowersCache& cache, const GroupElement& x,
                             const GroupElement& y);

/// Accelerated estimate of H(x, y) = lim r_m.
KernelEntry estimate_H(const PowersCache& cache, const GroupElement& x, const GroupElement& y,
                       const AccelerationOptions& opts = {});

/// Ratio-limit kernel estimated from a powers cache; memoised on
/// (x^-1 y, y), the only data the sequence depends on.
class RatioKernel final : public KernelSource {
 public:
  explicit RatioKernel(std::shared_ptr<const PowersCache> cache, AccelerationOptions opts = {});
  KernelEntry entry(const GroupElement& x, const GroupElement& y) const override;
  std::string name() const override { return "ratio-limit"; }
  const PowersCache& cache() const { return *cache_; }
  const AccelerationOptions& options() const { return opts_; }

 private:
  std::shared_ptr<const PowersCache> cache_;
  AccelerationOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<KernelKey, KernelEntry> memo_;
};

/// Closed form for isotropic nearest-neighbour walks on F_s:
///   H = (1 + c d(x,y)) / (1 + c d(e,y)) * (2s-1)^{(d(e,y) - d(x,y))/2},
/// c = (s-1)/s.
double closed_form_H_free_isotropic(int s, long dxy, long dey);
double closed_form_H_free_isotropic(const Group& g, const GroupElement& x, const GroupElement& y);

class ClosedFormFreeKernel final : public KernelSource {
 public:
  explicit ClosedFormFreeKernel(std::shared_ptr<const Group> group);
  KernelEntry entry(const GroupElement& x, const GroupElement& y) const override;
  std::string name() const override { return "closed-form"; }
};

/// Limit of the closed form along the geodesic ray a_i^k, k -> infinity:
/// (2s-1)^{-b/2} with b the Busemann function of the ray at x.
double free_boundary_limit(const Group& g, const GroupElement& x, std::int64_t letter);

struct BoundConstants {
  double C = 1.0;
  double c = 1.0;
  int n = 0;
  int n_prime = 0;
};

/// C_x = rho^n / mu^{*n}(x), c_x = mu^{*n'}(x^-1) / rho^{n'}, n and n'
/// minimal. Throws CoverageGap when x or x^-1 is not reached.
BoundConstants bound_constants(const PowersCache& cache, double rho_hat, const GroupElement& x);

/// Per-pair tail oscillation of r_m over a ball; never claims a proof.
DiagnosticsReport srlp_diagnostic(const PowersCache& cache, int ball_radius, double tol,
                                  const AccelerationOptions& opts = {});

struct RadicalReport {
  int tested_radius = 0;
  int probe_radius = 0;
  double tolerance = 0.0;  // < 0 means 3x propagated uncertainty per pair
  std::vector<GroupElement> flagged;
  /// max_x |H(x,y) - H(x,e)| per tested y, in ball order.
  std::vector<double> deviation;
  double product_closure = 0.0;
  double inverse_closure = 0.0;
  bool closure_ok = true;

  Json to_json(const Group& g) const;
};

/// Flags y with max_x |H(x,y) - H(x,e)| <= tol over x in the probe ball,
/// then checks product and inverse closure of the flagged set. A negative
/// tol selects 3 * (u(x,y) + u(x,e)) per pair.
RadicalReport detect_radical(const KernelSource& H, int ball_radius, int probe_radius,
                             double tol = -1.0);

/// sum_x |H(x,y) - H(x,z)| / (C_x 2^phi(x)) over the phi-prefix.
MetricValue ratio_metric(const KernelSource& H, const std::vector<GroupElement>& prefix,
                         const GroupElement& y, const GroupElement& z, const Normalizer& C);

struct TraceOptions {
  int metric_radius = 2;  // phi-prefix for the ratio metric
  double tol = 0.01;      // Cauchy tolerance on consecutive distances
};

/// Traces H(x, y_k) for x in `xs`, consecutive ratio-metric distances and
/// a verdict "converging" or "not Cauchy".
DiagnosticsReport boundary_trace(const KernelSource& H, const std::vector<GroupElement>& xs,
                                 const std::vector<GroupElement>& sequence, const Normalizer& C,
                                 const TraceOptions& opts = {});

struct CheckValue {
  double residual = 0.0;
  double uncertainty = 0.0;
};

/// |H(x, g y) H(g^-1, y) - H(g^-1 x, y)|.
CheckValue cocycle_check(const KernelSource& H, const GroupElement& g, const GroupElement& x,
                         const GroupElement& y);

/// |sum_s mu(s) H(x s, y) - rho H(x, y)|.
CheckValue rho_harmonicity_check(const KernelSource& H, const PowersCache& cache,
                                 const SpectralEstimate& rho, const GroupElement& x,
                                 const GroupElement& y);

/// Relative differences |K - H| / H along a sequence, for x in `xs`.
DiagnosticsReport martin_vs_ratio(const KernelSource& K, const KernelSource& H,
                                  const std::vector<GroupElement>& xs,
                                  const std::vector<GroupElement>& sequence, double tol);

}  // namespace walkbench
