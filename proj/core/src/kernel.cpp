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

#include "walkbench/kernel.hpp"

#include <algorithm>
#include <sstream>

#include "walkbench/errors.hpp"

namespace walkbench {

double KernelEntry::uncertainty() const { return std::max(hi - estimate, estimate - lo); }

KernelEntry KernelEntry::exact(double v, const std::string& method) {
  KernelEntry e;
  e.estimate = e.lo = e.hi = e.raw = v;
  e.method = method;
  return e;
}

KernelTable KernelTable::tabulate(const KernelSource& source, const std::vector<GroupElement>& xs,
                                  const std::vector<GroupElement>& ys) {
  KernelTable t(source.group_ptr(), source.name());
  for (const auto& x : xs) {
    for (const auto& y : ys) t.insert(x, y, source.entry(x, y));
  }
  return t;
}

KernelEntry KernelTable::entry(const GroupElement& x, const GroupElement& y) const {
  auto it = entries_.find({x, y});
  if (it == entries_.end()) {
    throw CoverageGap("no kernel entry for (" + group_->format(x) + ", " + group_->format(y) +
                      ")");
  }
  return it->second;
}

void KernelTable::insert(const GroupElement& x, const GroupElement& y, const KernelEntry& e) {
  entries_[{x, y}] = e;
}

bool KernelTable::contains(const GroupElement& x, const GroupElement& y) const {
  return entries_.count({x, y}) != 0;
}

std::string KernelTable::to_csv() const {
  std::ostringstream os;
  os << "x,y,estimate,lower,upper,method\n";
  for (const auto& [k, e] : entries_) {
    os << '"' << group_->format(k.first) << "\",\"" << group_->format(k.second) << "\","
       << format_double(e.estimate) << ',' << format_double(e.lo) << ',' << format_double(e.hi)
       << ',' << e.method << '\n';
  }
  return os.str();
}

Json KernelTable::to_json() const {
  Json j;
  j["group"] = group_->descriptor().to_string();
  j["kernel"] = label_;
  j["rho_hat"] = rho_hat;
  j["provenance"] = provenance;
  Json rows = Json::array();
  for (const auto& [k, e] : entries_) {
    rows.push_back({{"x", group_->format(k.first)},
                    {"y", group_->format(k.second)},
                    {"estimate", e.estimate},
                    {"lower", e.lo},
                    {"upper", e.hi},
                    {"m0", e.m0},
                    {"M", e.M},
                    {"accelerated", e.accelerated},
                    {"method", e.method},
                    {"raw", e.raw}});
  }
  j["entries"] = std::move(rows);
  return j;
}

KernelTable KernelTable::from_json(std::shared_ptr<const Group> group, const Json& j) {
  if (j.at("group").get<std::string>() != group->descriptor().to_string()) {
    throw DescriptorMismatch("kernel table for " + j.at("group").get<std::string>());
  }
  KernelTable t(group, j.value("kernel", "table"));
  t.rho_hat = j.value("rho_hat", 0.0);
  t.provenance = j.value("provenance", Json::object());
  for (const auto& row : j.at("entries")) {
    KernelEntry e;
    e.estimate = row.at("estimate").get<double>();
    e.lo = row.at("lower").get<double>();
    e.hi = row.at("upper").get<double>();
    e.m0 = row.value("m0", 0);
    e.M = row.value("M", 0);
    e.accelerated = row.value("accelerated", false);
    e.method = row.value("method", "");
    e.raw = row.value("raw", e.estimate);
    t.insert(group->parse(row.at("x").get<std::string>()),
             group->parse(row.at("y").get<std::string>()), e);
  }
  return t;
}

KernelEntry MemoKernel::entry(const GroupElement& x, const GroupElement& y) const {
  KernelKey key{x, y};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  auto e = inner_->entry(x, y);
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.emplace(std::move(key), std::move(e)).first->second;
}

ProductKernel::ProductKernel(std::shared_ptr<const Group> group,
                             std::shared_ptr<const KernelSource> left,
                             std::shared_ptr<const KernelSource> right)
    : KernelSource(std::move(group)), left_(std::move(left)), right_(std::move(right)) {
  if (group_->descriptor().family() != Family::kProduct) {
    throw DescriptorMismatch("product kernel on " + group_->descriptor().to_string());
  }
}

KernelEntry ProductKernel::entry(const GroupElement& x, const GroupElement& y) const {
  auto [w1, v1] = group_->split(x);
  auto [w2, v2] = group_->split(y);
  auto a = left_->entry(w1, w2);
  auto b = right_->entry(v1, v2);
  KernelEntry e;
  e.estimate = a.estimate * b.estimate;
  e.lo = a.lo * b.lo;
  e.hi = a.hi * b.hi;
  e.raw = a.raw * b.raw;
  e.m0 = std::max(a.m0, b.m0);
  e.M = std::min(a.M, b.M);
  e.accelerated = a.accelerated || b.accelerated;
  e.method = "product(" + a.method + "," + b.method + ")";
  return e;
}

}  // namespace walkbench
