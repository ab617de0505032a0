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

// Reference computations used by the tests. Nothing here calls into the
// engines under test except Group arithmetic, and the free-group helpers
// below do not even use that.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "walkbench/group.hpp"
#include "walkbench/measure.hpp"

namespace walkbench::testing {

using Dist = std::map<GroupElement, double>;

inline Dist plain(const ScaledMeasure& mu) {
  Dist out;
  const double s = std::exp(mu.log_scale);
  for (const auto& [g, v] : mu.support) out[g] = v * s;
  return out;
}

/// (a * b)(w) = sum_u a(u) b(u^-1 w) by direct double loop.
inline Dist brute_convolve(const Group& G, const Dist& a, const Dist& b) {
  Dist out;
  for (const auto& [u, pu] : a) {
    for (const auto& [v, pv] : b) out[G.multiply(u, v)] += pu * pv;
  }
  return out;
}

inline Dist brute_power(const Group& G, const Dist& step, int m) {
  Dist cur{{G.identity(), 1.0}};
  for (int i = 0; i < m; ++i) cur = brute_convolve(G, cur, step);
  return cur;
}

/// Lazy walk on Z, mu = {0: 1/2, +-1: 1/4}, is the square of the
/// half-step walk, so mu^{*m}(k) = C(2m, m+k) / 4^m.
inline double lazy_z_exact(int m, int k) {
  k = std::abs(k);
  if (k > m) return 0.0;
  // C(2m, m+k) / 4^m as a running product, interleaving the 1/4 factors
  // so nothing overflows.
  long double v = 1.0L;
  int quarters = m;
  for (int i = 1; i <= m - k; ++i) {
    v *= static_cast<long double>(m + k + i) / i;
    while (v > 1.0L && quarters > 0) {
      v /= 4.0L;
      --quarters;
    }
  }
  for (; quarters > 0; --quarters) v /= 4.0L;
  return static_cast<double>(v);
}

/// sum_m C(2m,m) 4^-m z^m = (1 - z)^{-1/2}.
inline double lazy_z_green_origin(double z) { return 1.0 / std::sqrt(1.0 - z); }

/// Isotropic free-group kernel written out from the formula.
inline double sawyer(int s, long dxy, long dey) {
  const double c = (s - 1.0) / s;
  return (1.0 + c * dxy) / (1.0 + c * dey) *
         std::pow(2.0 * s - 1.0, (static_cast<double>(dey) - static_cast<double>(dxy)) / 2.0);
}

// Free groups as strings over "aAbB...", independent of the library.

inline std::string reduce_word(const std::string& w) {
  std::string st;
  for (char c : w) {
    const bool cancels = !st.empty() && st.back() != c &&
                         std::tolower(static_cast<unsigned char>(st.back())) ==
                             std::tolower(static_cast<unsigned char>(c));
    if (cancels) {
      st.pop_back();
    } else {
      st.push_back(c);
    }
  }
  return st;
}

inline std::string free_letters(int s) {
  static const std::string lower = "abcdfghijk";
  std::string out;
  for (int i = 0; i < s; ++i) {
    out += lower[i];
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(lower[i])));
  }
  return out;
}

/// Distinct reduced words among all words of length <= r.
inline std::set<std::string> free_ball_bruteforce(int s, int r) {
  const std::string alpha = free_letters(s);
  std::set<std::string> out{""};
  std::vector<std::string> layer{""};
  for (int len = 1; len <= r; ++len) {
    std::vector<std::string> next;
    for (const auto& w : layer) {
      for (char c : alpha) next.push_back(w + c);
    }
    for (const auto& w : next) out.insert(reduce_word(w));
    layer = std::move(next);
  }
  return out;
}

/// |{u : |u| = k, d(u, w) = l}| for w = a^n in F_s, by enumeration.
inline long tree_count_bruteforce(int s, int n, int k, int l) {
  const std::string w(static_cast<std::size_t>(n), 'a');
  long count = 0;
  for (const auto& u : free_ball_bruteforce(s, k)) {
    if (static_cast<int>(u.size()) != k) continue;
    std::string inv;
    for (auto it = u.rbegin(); it != u.rend(); ++it) {
      const char c = *it;
      inv += std::islower(static_cast<unsigned char>(c))
                 ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                 : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (static_cast<int>(reduce_word(inv + w).size()) == l) ++count;
  }
  return count;
}

/// Return probabilities of simple random walk on F_2 by dynamic
/// programming over reduced words up to length n.
inline std::vector<double> f2_srw_returns(int n) {
  std::map<std::string, double> cur{{"", 1.0}};
  std::vector<double> out{1.0};
  for (int t = 1; t <= n; ++t) {
    std::map<std::string, double> next;
    for (const auto& [w, p] : cur) {
      for (char c : free_letters(2)) next[reduce_word(w + c)] += p / 4.0;
    }
    cur = std::move(next);
    out.push_back(cur.count("") ? cur[""] : 0.0);
  }
  return out;
}

/// Search among products of at most `depth` generators for b with a b = e.
inline std::vector<GroupElement> inverse_search(const Group& G, const GroupElement& a, int depth) {
  std::vector<GroupElement> found;
  std::set<GroupElement> seen{G.identity()};
  std::vector<GroupElement> layer{G.identity()};
  for (int d = 0; d <= depth; ++d) {
    for (const auto& b : layer) {
      if (G.is_identity(G.multiply(a, b))) found.push_back(b);
    }
    std::vector<GroupElement> next;
    for (const auto& b : layer) {
      for (const auto& s : G.generators()) {
        auto c = G.multiply(b, s);
        if (seen.insert(c).second) next.push_back(c);
      }
    }
    layer = std::move(next);
  }
  return found;
}

/// Cayley-graph distance to e by breadth-first search, -1 beyond radius.
inline int bfs_length(const Group& G, const GroupElement& a, int radius) {
  std::set<GroupElement> seen{G.identity()};
  std::vector<GroupElement> layer{G.identity()};
  for (int d = 0; d <= radius; ++d) {
    for (const auto& b : layer) {
      if (b == a) return d;
    }
    std::vector<GroupElement> next;
    for (const auto& b : layer) {
      for (const auto& s : G.generators()) {
        auto c = G.multiply(b, s);
        if (seen.insert(c).second) next.push_back(c);
      }
    }
    layer = std::move(next);
  }
  return -1;
}

}  // namespace walkbench::testing
