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

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "walkbench/diagnostics.hpp"
#include "walkbench/group.hpp"

namespace walkbench {

/// One kernel value with its uncertainty interval.
struct KernelEntry {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int m0 = 0;
  int M = 0;
  bool accelerated = false;
  std::string method;
  double raw = 0.0;

  double uncertainty() const;
  static KernelEntry exact(double v, const std::string& method = "exact");
};

/// Anything that yields kernel entries K(x, y) on one group.
class KernelSource {
 public:
  explicit KernelSource(std::shared_ptr<const Group> group) : group_(std::move(group)) {}
  virtual ~KernelSource() = default;

  virtual KernelEntry entry(const GroupElement& x, const GroupElement& y) const = 0;
  virtual std::string name() const = 0;

  double operator()(const GroupElement& x, const GroupElement& y) const {
    return entry(x, y).estimate;
  }
  const Group& group() const { return *group_; }
  std::shared_ptr<const Group> group_ptr() const { return group_; }

 protected:
  std::shared_ptr<const Group> group_;
};

using KernelKey = std::pair<GroupElement, GroupElement>;

/// Materialised table; lookups outside the table raise CoverageGap.
class KernelTable final : public KernelSource {
 public:
  explicit KernelTable(std::shared_ptr<const Group> group, std::string label = "table")
      : KernelSource(std::move(group)), label_(std::move(label)) {}

  /// Evaluates source on xs x ys.
  static KernelTable tabulate(const KernelSource& source, const std::vector<GroupElement>& xs,
                              const std::vector<GroupElement>& ys);

  KernelEntry entry(const GroupElement& x, const GroupElement& y) const override;
  std::string name() const override { return label_; }

  void insert(const GroupElement& x, const GroupElement& y, const KernelEntry& e);
  bool contains(const GroupElement& x, const GroupElement& y) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<KernelKey, KernelEntry>& entries() const { return entries_; }

  double rho_hat = 0.0;
  Json provenance = Json::object();

  /// Columns x, y, estimate, lower, upper, method.
  std::string to_csv() const;
  Json to_json() const;
  static KernelTable from_json(std::shared_ptr<const Group> group, const Json& j);

 private:
  std::string label_;
  std::map<KernelKey, KernelEntry> entries_;
};

/// Memoising wrapper for expensive sources; thread-safe.
class MemoKernel final : public KernelSource {
 public:
  explicit MemoKernel(std::shared_ptr<const KernelSource> inner)
      : KernelSource(inner->group_ptr()), inner_(std::move(inner)) {}
  KernelEntry entry(const GroupElement& x, const GroupElement& y) const override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<const KernelSource> inner_;
  mutable std::mutex mu_;
  mutable std::map<KernelKey, KernelEntry> memo_;
};

/// K(x, y) = 1 for all pairs.
class ConstantKernel final : public KernelSource {
 public:
  using KernelSource::KernelSource;
  KernelEntry entry(const GroupElement&, const GroupElement&) const override {
    return KernelEntry::exact(1.0, "constant");
  }
  std::string name() const override { return "constant"; }
};

/// H((w1,v1),(w2,v2)) = H1(w1,w2) H2(v1,v2) on a product group.
class ProductKernel final : public KernelSource {
 public:
  ProductKernel(std::shared_ptr<const Group> group, std::shared_ptr<const KernelSource> left,
                std::shared_ptr<const KernelSource> right);
  KernelEntry entry(const GroupElement& x, const GroupElement& y) const override;
  std::string name() const override { return "product"; }

 private:
  std::shared_ptr<const KernelSource> left_;
  std::shared_ptr<const KernelSource> right_;
};

}  // namespace walkbench
