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

#include "walkbench/acceleration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "walkbench/errors.hpp"

namespace walkbench {

const char* accelerator_name(Accelerator a) {
  switch (a) {
    case Accelerator::kRichardson: return "richardson";
    case Accelerator::kAitken: return "aitken";
    case Accelerator::kNone: return "none";
  }
  return "?";
}

Accelerator parse_accelerator(const std::string& name) {
  if (name == "richardson") return Accelerator::kRichardson;
  if (name == "aitken") return Accelerator::kAitken;
  if (name == "none" || name == "raw") return Accelerator::kNone;
  throw InvalidArgument("unknown accelerator \"" + name + "\"");
}

double neville_at_zero(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n == 0 || ys.size() != n) throw InvalidArgument("neville: bad node count");
  std::vector<double> p(ys.begin(), ys.end());
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i + k < n; ++i) {
      p[i] = (xs[i] * p[i + 1] - xs[i + k] * p[i]) / (xs[i] - xs[i + k]);
    }
  }
  return p[0];
}

double aitken_delta2(double a0, double a1, double a2) {
  const double den = a2 - 2.0 * a1 + a0;
  if (den == 0.0) return a2;
  return a2 - (a2 - a1) * (a2 - a1) / den;
}

double TailEstimate::uncertainty() const {
  return std::max(hi - estimate, estimate - lo);
}

TailEstimate accelerate_log_tail(const std::function<double(int)>& log_seq, int m_min, int M,
                                 const AccelerationOptions& opts) {
  if (M < m_min) throw InvalidArgument("empty tail");
  const int stride = std::max(1, opts.stride);
  std::map<int, double> memo;
  auto L = [&](int m) {
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    double v = log_seq(m);
    if (!std::isfinite(v)) {
      throw NumericalError("sequence undefined at m=" + std::to_string(m));
    }
    memo.emplace(m, v);
    return v;
  };

  TailEstimate out;
  out.M = M;
  out.method = opts.method;
  out.raw = std::exp(L(M));

  // Raw tail, stride-spaced back from M.
  double rmin = out.raw, rmax = out.raw;
  for (int j = 0; j < opts.raw_tail_length; ++j) {
    int m = M - j * stride;
    if (m < m_min) break;
    double v = std::exp(L(m));
    out.raw_tail.emplace_back(m, v);
    rmin = std::min(rmin, v);
    rmax = std::max(rmax, v);
  }
  std::reverse(out.raw_tail.begin(), out.raw_tail.end());
  out.raw_oscillation = rmax - rmin;
  out.m0 = out.raw_tail.front().first;

  auto finish_raw = [&] {
    out.estimate = out.raw;
    out.lo = rmin;
    out.hi = rmax;
    out.accelerated = false;
    out.method = Accelerator::kNone;
    return out;
  };
  if (opts.method == Accelerator::kNone) return finish_raw();

  const int order = std::max(1, opts.order);
  const int wstep = stride * std::max(1, M / (64 * stride));
  int h = stride * std::max(1, M / (opts.spacing_divisor * stride));
  // Shrink the node spacing until every node fits in [m_min, M].
  const int span_needed = (opts.window - 1) * wstep;
  while (h > stride && M - span_needed - (order + 1) * h < m_min) h -= stride;
  if (M - span_needed - (order + 1) * h < m_min || M - 2 * stride < m_min) return finish_raw();

  auto richardson = [&](int end, int k) {
    std::vector<double> xs, ys;
    for (int i = k; i >= 0; --i) {
      int m = end - i * h;
      xs.push_back(1.0 / m);
      ys.push_back(L(m));
    }
    return std::exp(neville_at_zero(xs, ys));
  };
  auto aitken = [&](int end) {
    return aitken_delta2(std::exp(L(end - 2 * stride)), std::exp(L(end - stride)),
                         std::exp(L(end)));
  };
  auto accel = [&](int end) {
    return opts.method == Accelerator::kAitken ? aitken(end) : richardson(end, order);
  };

  out.estimate = accel(M);
  out.lo = out.hi = out.estimate;
  for (int j = opts.window - 1; j >= 0; --j) {
    int end = M - j * wstep;
    double v = j == 0 ? out.estimate : accel(end);
    out.accelerated_tail.emplace_back(end, v);
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  }
  if (opts.method == Accelerator::kRichardson) {
    double v = richardson(M, order + 1);
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  }
  out.m0 = std::min(out.m0, memo.begin()->first);

  // Exactly constant data is returned exactly.
  const double first = memo.begin()->second;
  bool constant = std::all_of(memo.begin(), memo.end(),
                              [&](const auto& kv) { return kv.second == first; });
  if (constant) {
    out.estimate = out.lo = out.hi = out.raw;
    for (auto& kv : out.accelerated_tail) kv.second = out.raw;
  }
  out.accelerated = true;
  return out;
}

}  // namespace walkbench
