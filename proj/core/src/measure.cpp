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

#include "walkbench/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "walkbench/errors.hpp"

namespace walkbench {

ScaledMeasure ScaledMeasure::point_mass(const Group& g) {
  ScaledMeasure m;
  m.support.emplace(g.identity(), 1.0);
  return m;
}

ScaledMeasure ScaledMeasure::from_probabilities(
    const std::vector<std::pair<GroupElement, double>>& entries) {
  ScaledMeasure m;
  m.step_index = 1;
  for (const auto& [g, p] : entries) {
    if (p < 0) throw InvalidArgument("negative probability");
    if (p > 0) m.support[g] += p;
  }
  m.normalize();
  return m;
}

double ScaledMeasure::value(const GroupElement& g) const {
  auto it = support.find(g);
  return it == support.end() ? 0.0 : it->second * std::exp(log_scale);
}

double ScaledMeasure::log_value(const GroupElement& g) const {
  auto it = support.find(g);
  if (it == support.end()) return -std::numeric_limits<double>::infinity();
  return std::log(it->second) + log_scale;
}

double ScaledMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& kv : support) s += kv.second;
  return s * std::exp(log_scale);
}

void ScaledMeasure::normalize() {
  double mx = 0.0;
  for (const auto& kv : support) mx = std::max(mx, kv.second);
  if (mx <= 0.0) return;
  for (auto& kv : support) kv.second /= mx;
  log_scale += std::log(mx);
}

ScaledMeasure convolve(const Group& g, const ScaledMeasure& mu, const ScaledMeasure& nu,
                       std::size_t support_budget) {
  std::unordered_map<GroupElement, double, GroupElementHash> acc;
  acc.reserve(mu.support.size() * nu.support.size());
  // Iterating both maps in key order fixes the summation order per bucket.
  for (const auto& [u, a] : mu.support) {
    for (const auto& [v, b] : nu.support) {
      const double ab = a * b;
      if (ab == 0.0) throw NumericalError("mantissa underflow in convolve");
      acc[g.multiply(u, v)] += ab;
      if (acc.size() > support_budget) {
        throw BudgetExceeded("convolution support above " + std::to_string(support_budget));
      }
    }
  }
  ScaledMeasure out;
  out.log_scale = mu.log_scale + nu.log_scale;
  out.step_index = mu.step_index + nu.step_index;
  for (auto& kv : acc) {
    if (kv.second > 0) out.support.emplace(kv.first, kv.second);
  }
  out.normalize();
  return out;
}

MeasureReport validate_measure(const Group& g, const ScaledMeasure& mu, int r_check,
                               int probe_depth, std::size_t budget) {
  MeasureReport rep;
  for (const auto& kv : mu.support) {
    if (kv.second < 0) throw InvalidArgument("negative entry at " + g.format(kv.first));
  }
  rep.mass = mu.total_mass();
  if (std::abs(rep.mass - 1.0) > 1e-12) {
    std::ostringstream os;
    os << std::setprecision(17) << "measure mass is " << rep.mass << ", expected 1";
    throw InvalidArgument(os.str());
  }

  rep.symmetric = true;
  for (const auto& [x, a] : mu.support) {
    double b = mu.value(g.inverse(x));
    if (std::abs(a * std::exp(mu.log_scale) - b) > 1e-14) {
      rep.symmetric = false;
      break;
    }
  }

  // Period: gcd of return times, from iterated supports.
  std::unordered_set<GroupElement, GroupElementHash> cur{g.identity()};
  int gcd = 0;
  rep.period_probe_depth = 0;
  for (int n = 1; n <= probe_depth; ++n) {
    std::unordered_set<GroupElement, GroupElementHash> next;
    for (const auto& u : cur) {
      for (const auto& kv : mu.support) next.insert(g.multiply(u, kv.first));
    }
    if (next.count(g.identity())) gcd = std::gcd(gcd, n);
    cur = std::move(next);
    rep.period_probe_depth = n;
    if (gcd == 1 || cur.size() > budget) break;
  }
  rep.period = gcd;

  // Semigroup generation evidence: breadth-first closure under right
  // multiplication by the support, until ball(r_check) is covered.
  rep.generation_radius = r_check;
  auto target = g.ball(r_check);
  std::unordered_set<GroupElement, GroupElementHash> seen;
  std::vector<GroupElement> frontier;
  for (const auto& kv : mu.support) {
    if (seen.insert(kv.first).second) frontier.push_back(kv.first);
  }
  auto covered = [&] {
    return std::all_of(target.begin(), target.end(),
                       [&](const GroupElement& t) { return seen.count(t) != 0; });
  };
  rep.generation = "inconclusive";
  while (true) {
    if (covered()) {
      rep.generation = "generates";
      break;
    }
    if (frontier.empty()) {
      rep.generation = "fails";
      break;
    }
    if (seen.size() > budget) break;
    std::vector<GroupElement> next;
    for (const auto& u : frontier) {
      for (const auto& kv : mu.support) {
        auto w = g.multiply(u, kv.first);
        if (seen.insert(w).second) next.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
  return rep;
}

double parse_probability(const std::string& text) {
  auto slash = text.find('/');
  auto to_double = [&](const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw ParseError("bad probability \"" + text + "\"");
    }
    return v;
  };
  if (slash == std::string::npos) return to_double(text);
  double num = to_double(text.substr(0, slash));
  double den = to_double(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in \"" + text + "\"");
  return num / den;
}

ScaledMeasure parse_measure(const Group& g, std::istream& in) {
  std::vector<std::pair<GroupElement, double>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto last = line.find_last_not_of(" \t\r");
    if (last == std::string::npos) continue;
    line.resize(last + 1);
    auto split = line.find_last_of(" \t");
    if (split == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected \"<element> <probability>\"");
    }
    auto elem = g.parse(line.substr(0, split));
    double p = parse_probability(line.substr(split + 1));
    if (p < 0) throw InvalidArgument("line " + std::to_string(lineno) + ": negative probability");
    entries.emplace_back(std::move(elem), p);
  }
  if (entries.empty()) throw ParseError("measure file has no entries");
  auto mu = ScaledMeasure::from_probabilities(entries);
  if (std::abs(mu.total_mass() - 1.0) > 1e-12) {
    std::ostringstream os;
    os << std::setprecision(17) << "measure mass is " << mu.total_mass() << ", expected 1";
    throw InvalidArgument(os.str());
  }
  return mu;
}

ScaledMeasure load_measure(const Group& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open measure file " + path);
  return parse_measure(g, in);
}

std::string format_measure(const Group& g, const ScaledMeasure& mu) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& kv : mu.support) {
    os << g.format(kv.first) << ' ' << kv.second * std::exp(mu.log_scale) << '\n';
  }
  return os.str();
}

}  // namespace walkbench
