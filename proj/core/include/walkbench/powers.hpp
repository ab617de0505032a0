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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "walkbench/group.hpp"
#include "walkbench/measure.hpp"
#include "walkbench/radial.hpp"

namespace walkbench {

enum class EngineKind { kGeneric, kLattice, kRadial, kCartesian };
const char* engine_name(EngineKind k);

struct PowersOptions {
  /// Cap on the support of a single generic level.
  std::size_t support_budget = 20'000'000;
  /// Cap on the summed support of all retained generic levels.
  std::size_t total_budget = 40'000'000;
  /// Lattice levels keep only the l-infinity box of this radius, unless the
  /// whole box has at most lattice_full_keep_cells cells. The newest level
  /// is always kept whole.
  int lattice_retain_radius = 16;
  std::size_t lattice_full_keep_cells = std::size_t{1} << 16;
};

/// Convolution powers mu^{*m}, m = 0..depth(), all levels retained.
/// Values are handed out as natural logs so deep levels never underflow.
class PowersCache {
 public:
  PowersCache(std::shared_ptr<const Group> group, ScaledMeasure step, int requested)
      : group_(std::move(group)), step_(std::move(step)), requested_(requested) {}
  virtual ~PowersCache() = default;
  PowersCache(const PowersCache&) = delete;
  PowersCache& operator=(const PowersCache&) = delete;

  virtual EngineKind kind() const = 0;
  /// Whether g is in the support of mu^{*m} (edge presence). m <= depth().
  virtual bool present(int m, const GroupElement& g) const = 0;
  /// log mu^{*m}(g), -inf when absent. Throws NumericalError if the entry
  /// is present but its mantissa underflowed.
  virtual double log_value(int m, const GroupElement& g) const = 0;
  /// Total mass of level m; 1 up to rounding.
  virtual double total_mass(int m) const = 0;

  double value(int m, const GroupElement& g) const;
  /// Smallest n in [from, depth()] with g present, or -1.
  int first_level(const GroupElement& g, int from = 0) const;

  const Group& group() const { return *group_; }
  std::shared_ptr<const Group> group_ptr() const { return group_; }
  const ScaledMeasure& step() const { return step_; }
  int depth() const { return depth_; }
  int requested_depth() const { return requested_; }
  /// True when a budget stopped the recursion before requested_depth().
  bool truncated() const { return depth_ < requested_; }
  const std::string& truncation_reason() const { return truncation_reason_; }

 protected:
  void check_level(int m) const;

  std::shared_ptr<const Group> group_;
  ScaledMeasure step_;
  int requested_ = 0;
  int depth_ = -1;
  std::string truncation_reason_;
};

/// Keyed-collection engine for any family.
class GenericPowers final : public PowersCache {
 public:
  GenericPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu, int M,
                const PowersOptions& opts = {});
  /// Restores previously computed levels (level 0 first).
  GenericPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu,
                std::vector<ScaledMeasure> levels, int requested, std::string reason = {});
  EngineKind kind() const override { return EngineKind::kGeneric; }
  bool present(int m, const GroupElement& g) const override;
  double log_value(int m, const GroupElement& g) const override;
  double total_mass(int m) const override;
  const ScaledMeasure& level(int m) const;

 private:
  std::vector<ScaledMeasure> levels_;
};

/// Dense box engine for lattices.
class LatticePowers final : public PowersCache {
 public:
  struct Level {
    int radius = 0;       // half-width of the stored box
    int full_radius = 0;  // half-width of the support box at this level
    double log_scale = 0.0;
    std::vector<double> mantissa;
    std::vector<std::uint8_t> reach;
  };

  LatticePowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu, int M,
                const PowersOptions& opts = {});
  LatticePowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu,
                std::vector<Level> levels, int requested, std::string reason = {});
  EngineKind kind() const override { return EngineKind::kLattice; }
  bool present(int m, const GroupElement& g) const override;
  double log_value(int m, const GroupElement& g) const override;
  double total_mass(int m) const override;
  const Level& level(int m) const;
  int rank() const { return d_; }

 private:
  // Flat index of g in the box of the given radius, or -1 if outside.
  std::int64_t index(const Level& lv, const GroupElement& g, int m) const;

  int d_ = 1;
  std::vector<Level> levels_;
};

/// Isotropic walks on free groups: one value per tree distance.
class RadialPowers final : public PowersCache {
 public:
  RadialPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu, int M,
               const PowersOptions& opts = {});
  RadialPowers(std::shared_ptr<const Group> group, const ScaledMeasure& mu,
               std::vector<RadialMeasure> levels, std::vector<std::vector<std::uint8_t>> reach,
               int requested, std::string reason = {});
  EngineKind kind() const override { return EngineKind::kRadial; }
  bool present(int m, const GroupElement& g) const override;
  double log_value(int m, const GroupElement& g) const override;
  double total_mass(int m) const override;

  bool present_at(int m, int d) const;
  double log_value_at(int m, int d) const;
  const RadialMeasure& level(int m) const;
  const std::vector<std::uint8_t>& reach(int m) const;

 private:
  std::vector<RadialMeasure> levels_;
  std::vector<std::vector<std::uint8_t>> reach_;
};

/// Cartesian walk p * (mu1 x delta) + (1 - p) * (delta x mu2) on a product
/// group, from the two component caches:
///   mu^{*m}(w, v) = sum_k C(m,k) p^k (1-p)^{m-k} mu1^{*k}(w) mu2^{*(m-k)}(v).
class CartesianPowers final : public PowersCache {
 public:
  CartesianPowers(std::shared_ptr<const Group> group, std::shared_ptr<const PowersCache> left,
                  std::shared_ptr<const PowersCache> right, double p_left);
  EngineKind kind() const override { return EngineKind::kCartesian; }
  bool present(int m, const GroupElement& g) const override;
  double log_value(int m, const GroupElement& g) const override;
  double total_mass(int m) const override;

  const PowersCache& left() const { return *left_; }
  const PowersCache& right() const { return *right_; }
  double p_left() const { return p_; }

 private:
  const std::vector<double>& column(const GroupElement& g) const;

  std::shared_ptr<const PowersCache> left_;
  std::shared_ptr<const PowersCache> right_;
  double p_;
  std::vector<double> lbinom_;  // flattened log C(m,k), row m at m(m+1)/2
  mutable std::mutex mu_;
  mutable std::unordered_map<GroupElement, std::vector<double>, GroupElementHash> memo_;
};

enum class EngineChoice { kAuto, kGeneric, kLattice, kRadial };

/// Builds the powers cache up to depth M. kAuto picks the lattice engine on
/// lattices, the radial engine for isotropic measures on free groups, the
/// Cartesian engine for product measures supported on the two axes, and the
/// generic engine otherwise. A budget hit returns a truncated cache.
std::shared_ptr<const PowersCache> build_powers(std::shared_ptr<const Group> group,
                                                const ScaledMeasure& mu, int M,
                                                EngineChoice choice = EngineChoice::kAuto,
                                                const PowersOptions& opts = {});

/// mu^{*n}(x^-1 y).
double transition(const PowersCache& cache, int n, const GroupElement& x, const GroupElement& y);
double log_transition(const PowersCache& cache, int n, const GroupElement& x,
                      const GroupElement& y);

struct PeriodReport {
  bool aperiodic = false;
  int period = 0;  // 0 when no return was observed up to the depth
  bool conclusive = false;
};

/// gcd of { n <= depth : mu^{*n}(e) > 0 }, n >= 1.
PeriodReport is_aperiodic(const PowersCache& cache);

}  // namespace walkbench
