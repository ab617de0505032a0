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

#include "walkbench/group.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "walkbench/errors.hpp"

namespace walkbench {
namespace {

// Letters used for free generators; 'e' is reserved for the identity.
constexpr std::string_view kFreeAlphabet = "abcdfghijklmnopqrstuvwxyz";

using Lamp = std::vector<std::int64_t>;

void skip_ws(std::string_view s, std::size_t& p) {
  while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
}

bool consume(std::string_view s, std::size_t& p, char c) {
  skip_ws(s, p);
  if (p < s.size() && s[p] == c) {
    ++p;
    return true;
  }
  return false;
}

void expect(std::string_view s, std::size_t& p, char c) {
  if (!consume(s, p, c)) {
    throw ParseError("expected '" + std::string(1, c) + "' at offset " +
                     std::to_string(p) + " in \"" + std::string(s) + "\"");
  }
}

std::int64_t parse_int(std::string_view s, std::size_t& p) {
  skip_ws(s, p);
  std::size_t start = p;
  if (p < s.size() && (s[p] == '-' || s[p] == '+')) ++p;
  // Accept the unicode minus sign as well, it shows up in pasted tables.
  bool unicode_minus = false;
  if (p == start && s.substr(p, 3) == "\xE2\x88\x92") {
    p += 3;
    unicode_minus = true;
  }
  std::size_t digits = p;
  while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
  if (p == digits) {
    throw ParseError("expected integer at offset " + std::to_string(start) +
                     " in \"" + std::string(s) + "\"");
  }
  std::int64_t v = 0;
  auto first = s.data() + (unicode_minus ? digits : start);
  if (!unicode_minus && s[start] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + p, v);
  if (ec != std::errc()) throw ParseError("integer out of range");
  return unicode_minus ? -v : v;
}

std::vector<std::int64_t> parse_tuple(std::string_view s, std::size_t& p, int d) {
  std::vector<std::int64_t> out;
  if (d == 1 && !(skip_ws(s, p), p < s.size() && s[p] == '(')) {
    out.push_back(parse_int(s, p));
    return out;
  }
  expect(s, p, '(');
  out.push_back(parse_int(s, p));
  while (consume(s, p, ',')) out.push_back(parse_int(s, p));
  expect(s, p, ')');
  if (static_cast<int>(out.size()) != d) {
    throw ParseError("expected " + std::to_string(d) + " coordinates, got " +
                     std::to_string(out.size()));
  }
  return out;
}

std::string format_tuple(std::span<const std::int64_t> v, bool bare_scalar) {
  if (bare_scalar && v.size() == 1) return std::to_string(v[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out + ")";
}

// Symmetric difference of two sorted, duplicate-free lamp lists.
std::vector<Lamp> lamp_xor(const std::vector<Lamp>& a, const std::vector<Lamp>& b) {
  std::vector<Lamp> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

struct LampView {
  std::vector<std::int64_t> pos;
  std::vector<Lamp> lamps;
};

LampView unpack_lamp(std::span<const std::int64_t> code, int d) {
  LampView v;
  v.pos.assign(code.begin(), code.begin() + d);
  for (std::size_t i = d; i < code.size(); i += d) {
    v.lamps.emplace_back(code.begin() + i, code.begin() + i + d);
  }
  return v;
}

GroupElement pack_lamp(const std::vector<std::int64_t>& pos, const std::vector<Lamp>& lamps) {
  std::vector<std::int64_t> code(pos);
  for (const auto& l : lamps) code.insert(code.end(), l.begin(), l.end());
  return GroupElement(std::move(code));
}

std::vector<Lamp> shift_lamps(const std::vector<Lamp>& lamps,
                              const std::vector<std::int64_t>& by, int sign) {
  // Translation preserves lexicographic order, so no re-sort is needed.
  std::vector<Lamp> out = lamps;
  for (auto& l : out) {
    for (std::size_t i = 0; i < l.size(); ++i) l[i] += sign * by[i];
  }
  return out;
}

}  // namespace

std::size_t GroupElement::hash() const noexcept {
  // FNV-1a over the code words; stable across runs and platforms.
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int64_t w : code_) {
    auto u = static_cast<std::uint64_t>(w);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xFF;
      h *= 1099511628211ULL;
    }
  }
  h ^= code_.size();
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------- descriptor

GroupDescriptor GroupDescriptor::trivial() { return GroupDescriptor(); }

GroupDescriptor GroupDescriptor::lattice(int d) {
  if (d < 1) throw InvalidArgument("lattice rank must be >= 1");
  GroupDescriptor g;
  g.family_ = Family::kLattice;
  g.rank_ = d;
  return g;
}

GroupDescriptor GroupDescriptor::free_group(int s) {
  if (s < 1 || s > static_cast<int>(kFreeAlphabet.size())) {
    throw InvalidArgument("free rank must be in [1, 25]");
  }
  GroupDescriptor g;
  g.family_ = Family::kFree;
  g.rank_ = s;
  return g;
}

GroupDescriptor GroupDescriptor::lamplighter(int d) {
  if (d < 1) throw InvalidArgument("lamplighter base rank must be >= 1");
  GroupDescriptor g;
  g.family_ = Family::kLamplighter;
  g.rank_ = d;
  return g;
}

GroupDescriptor GroupDescriptor::product(const GroupDescriptor& left,
                                         const GroupDescriptor& right) {
  GroupDescriptor g;
  g.family_ = Family::kProduct;
  g.left_ = std::make_shared<const GroupDescriptor>(left);
  g.right_ = std::make_shared<const GroupDescriptor>(right);
  if (g.product_depth() > kMaxProductDepth) {
    throw InvalidArgument("product nesting deeper than " +
                          std::to_string(kMaxProductDepth));
  }
  return g;
}

const GroupDescriptor& GroupDescriptor::left() const {
  if (family_ != Family::kProduct) throw InvalidArgument("not a product descriptor");
  return *left_;
}

const GroupDescriptor& GroupDescriptor::right() const {
  if (family_ != Family::kProduct) throw InvalidArgument("not a product descriptor");
  return *right_;
}

int GroupDescriptor::product_depth() const {
  if (family_ != Family::kProduct) return 0;
  return 1 + std::max(left_->product_depth(), right_->product_depth());
}

std::string GroupDescriptor::to_string() const {
  switch (family_) {
    case Family::kTrivial: return "trivial";
    case Family::kLattice: return "lattice(" + std::to_string(rank_) + ")";
    case Family::kFree: return "free(" + std::to_string(rank_) + ")";
    case Family::kLamplighter: return "lamplighter(" + std::to_string(rank_) + ")";
    case Family::kProduct:
      return "product(" + left_->to_string() + "," + right_->to_string() + ")";
  }
  return "?";
}

bool operator==(const GroupDescriptor& a, const GroupDescriptor& b) {
  if (a.family_ != b.family_ || a.rank_ != b.rank_) return false;
  if (a.family_ != Family::kProduct) return true;
  return *a.left_ == *b.left_ && *a.right_ == *b.right_;
}

namespace {

GroupDescriptor parse_descriptor(std::string_view s, std::size_t& p) {
  skip_ws(s, p);
  std::size_t start = p;
  while (p < s.size() && std::isalpha(static_cast<unsigned char>(s[p]))) ++p;
  std::string name(s.substr(start, p - start));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (name == "trivial") return GroupDescriptor::trivial();
  if (name == "product") {
    expect(s, p, '(');
    auto l = parse_descriptor(s, p);
    expect(s, p, ',');
    auto r = parse_descriptor(s, p);
    expect(s, p, ')');
    return GroupDescriptor::product(l, r);
  }
  expect(s, p, '(');
  auto n = parse_int(s, p);
  expect(s, p, ')');
  if (name == "lattice" || name == "z") return GroupDescriptor::lattice(static_cast<int>(n));
  if (name == "free" || name == "f") return GroupDescriptor::free_group(static_cast<int>(n));
  if (name == "lamplighter") return GroupDescriptor::lamplighter(static_cast<int>(n));
  throw ParseError("unknown group family \"" + name + "\"");
}

}  // namespace

GroupDescriptor GroupDescriptor::parse(std::string_view text) {
  std::size_t p = 0;
  auto d = parse_descriptor(text, p);
  skip_ws(text, p);
  if (p != text.size()) throw ParseError("trailing text in descriptor \"" + std::string(text) + "\"");
  return d;
}

// --------------------------------------------------------------------- group

Group::Group(GroupDescriptor descriptor, GroupOptions options)
    : descriptor_(std::move(descriptor)), options_(options) {
  const int d = descriptor_.rank();
  switch (descriptor_.family()) {
    case Family::kTrivial:
      break;
    case Family::kLattice:
      for (int i = 0; i < d; ++i) {
        for (int sgn : {1, -1}) {
          std::vector<std::int64_t> c(d, 0);
          c[i] = sgn;
          generators_.emplace_back(std::move(c));
        }
      }
      break;
    case Family::kFree:
      for (int i = 1; i <= d; ++i) {
        generators_.push_back(GroupElement({i}));
        generators_.push_back(GroupElement({-i}));
      }
      break;
    case Family::kLamplighter: {
      for (int i = 0; i < d; ++i) {
        for (int sgn : {1, -1}) {
          std::vector<std::int64_t> c(d, 0);
          c[i] = sgn;
          generators_.emplace_back(std::move(c));
        }
      }
      std::vector<std::int64_t> toggle(2 * d, 0);
      generators_.emplace_back(std::move(toggle));
      break;
    }
    case Family::kProduct: {
      left_ = std::make_shared<const Group>(descriptor_.left(), options_);
      right_ = std::make_shared<const Group>(descriptor_.right(), options_);
      for (const auto& g : left_->generators()) {
        generators_.push_back(pair(g, right_->identity()));
      }
      for (const auto& h : right_->generators()) {
        generators_.push_back(pair(left_->identity(), h));
      }
      break;
    }
  }
}

const Group& Group::left() const {
  if (!left_) throw InvalidArgument("not a product group");
  return *left_;
}

const Group& Group::right() const {
  if (!right_) throw InvalidArgument("not a product group");
  return *right_;
}

GroupElement Group::identity() const {
  switch (descriptor_.family()) {
    case Family::kTrivial:
    case Family::kFree:
      return GroupElement();
    case Family::kLattice:
    case Family::kLamplighter:
      return GroupElement(std::vector<std::int64_t>(descriptor_.rank(), 0));
    case Family::kProduct:
      return pair(left_->identity(), right_->identity());
  }
  return GroupElement();
}

bool Group::is_identity(const GroupElement& a) const { return a == identity(); }

void Group::validate(const GroupElement& a) const {
  auto c = a.code();
  const auto d = static_cast<std::size_t>(descriptor_.rank());
  auto fail = [&](const std::string& why) {
    throw DescriptorMismatch(why + " for " + descriptor_.to_string());
  };
  switch (descriptor_.family()) {
    case Family::kTrivial:
      if (!c.empty()) fail("non-empty code");
      return;
    case Family::kLattice:
      if (c.size() != d) fail("wrong coordinate count");
      return;
    case Family::kFree:
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0 || std::llabs(c[i]) > static_cast<long long>(d)) fail("letter out of range");
        if (i && c[i] == -c[i - 1]) fail("unreduced word");
      }
      return;
    case Family::kLamplighter: {
      if (c.size() < d || c.size() % d != 0) fail("malformed lamp state");
      auto v = unpack_lamp(c, static_cast<int>(d));
      for (std::size_t i = 1; i < v.lamps.size(); ++i) {
        if (!(v.lamps[i - 1] < v.lamps[i])) fail("lamps not sorted and distinct");
      }
      return;
    }
    case Family::kProduct: {
      if (c.empty() || c[0] < 0 || static_cast<std::size_t>(c[0]) + 1 > c.size()) {
        fail("malformed pair");
      }
      auto [l, r] = split(a);
      left_->validate(l);
      right_->validate(r);
      return;
    }
  }
}

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
  auto x = a.code();
  auto y = b.code();
  switch (descriptor_.family()) {
    case Family::kTrivial:
      return GroupElement();
    case Family::kLattice: {
      if (x.size() != y.size() || x.size() != static_cast<std::size_t>(descriptor_.rank())) {
        throw DescriptorMismatch("lattice operands of wrong rank");
      }
      std::vector<std::int64_t> out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
      return GroupElement(std::move(out));
    }
    case Family::kFree: {
      // Cancel the longest suffix of a against the prefix of b.
      std::size_t k = 0;
      while (k < x.size() && k < y.size() && x[x.size() - 1 - k] == -y[k]) ++k;
      std::vector<std::int64_t> out(x.begin(), x.end() - k);
      out.insert(out.end(), y.begin() + k, y.end());
      return GroupElement(std::move(out));
    }
    case Family::kLamplighter: {
      const int d = descriptor_.rank();
      if (x.size() < static_cast<std::size_t>(d) || y.size() < static_cast<std::size_t>(d)) {
        throw DescriptorMismatch("lamplighter operand too short");
      }
      auto va = unpack_lamp(x, d);
      auto vb = unpack_lamp(y, d);
      std::vector<std::int64_t> pos(d);
      for (int i = 0; i < d; ++i) pos[i] = va.pos[i] + vb.pos[i];
      return pack_lamp(pos, lamp_xor(va.lamps, shift_lamps(vb.lamps, va.pos, 1)));
    }
    case Family::kProduct: {
      auto [al, ar] = split(a);
      auto [bl, br] = split(b);
      return pair(left_->multiply(al, bl), right_->multiply(ar, br));
    }
  }
  return GroupElement();
}

GroupElement Group::inverse(const GroupElement& a) const {
  auto x = a.code();
  switch (descriptor_.family()) {
    case Family::kTrivial:
      return GroupElement();
    case Family::kLattice: {
      std::vector<std::int64_t> out(x.begin(), x.end());
      for (auto& v : out) v = -v;
      return GroupElement(std::move(out));
    }
    case Family::kFree: {
      std::vector<std::int64_t> out(x.rbegin(), x.rend());
      for (auto& v : out) v = -v;
      return GroupElement(std::move(out));
    }
    case Family::kLamplighter: {
      const int d = descriptor_.rank();
      auto v = unpack_lamp(x, d);
      std::vector<std::int64_t> pos(d);
      for (int i = 0; i < d; ++i) pos[i] = -v.pos[i];
      return pack_lamp(pos, shift_lamps(v.lamps, v.pos, -1));
    }
    case Family::kProduct: {
      auto [l, r] = split(a);
      return pair(left_->inverse(l), right_->inverse(r));
    }
  }
  return GroupElement();
}

std::int64_t Group::word_length(const GroupElement& a) const {
  auto x = a.code();
  switch (descriptor_.family()) {
    case Family::kTrivial:
      return 0;
    case Family::kLattice: {
      std::int64_t s = 0;
      for (auto v : x) s += std::llabs(v);
      return s;
    }
    case Family::kFree:
      return static_cast<std::int64_t>(x.size());
    case Family::kLamplighter:
      return bfs_distance(a);
    case Family::kProduct: {
      // The generating set is the disjoint union of the factor sets, so the
      // Cayley distance splits as a sum.
      auto [l, r] = split(a);
      return left_->word_length(l) + right_->word_length(r);
    }
  }
  return 0;
}

std::int64_t Group::bfs_distance(const GroupElement& a) const {
  if (is_identity(a)) return 0;
  std::unordered_set<GroupElement, GroupElementHash> seen{identity()};
  std::vector<GroupElement> frontier{identity()};
  for (int r = 1; r <= options_.word_length_radius; ++r) {
    std::vector<GroupElement> next;
    for (const auto& u : frontier) {
      for (const auto& g : generators_) {
        auto w = multiply(u, g);
        if (w == a) return r;
        if (seen.insert(w).second) next.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
  throw BudgetExceeded("word length exceeds radius " +
                       std::to_string(options_.word_length_radius));
}

std::vector<GroupElement> Group::ball(int radius) const {
  if (radius < 0) throw InvalidArgument("negative radius");
  std::vector<GroupElement> out{identity()};
  std::unordered_set<GroupElement, GroupElementHash> seen{identity()};
  std::size_t begin = 0;
  for (int r = 1; r <= radius; ++r) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& g : generators_) {
        auto w = multiply(out[i], g);
        if (seen.insert(w).second) {
          if (out.size() >= options_.ball_budget) {
            throw BudgetExceeded("ball of radius " + std::to_string(radius) +
                                 " exceeds " + std::to_string(options_.ball_budget) +
                                 " elements");
          }
          out.push_back(std::move(w));
        }
      }
    }
    begin = end;
  }
  return out;
}

// ----------------------------------------------------------------- builders

GroupElement Group::lattice_point(std::span<const std::int64_t> coords) const {
  if (descriptor_.family() != Family::kLattice ||
      coords.size() != static_cast<std::size_t>(descriptor_.rank())) {
    throw DescriptorMismatch("lattice point of rank " + std::to_string(coords.size()));
  }
  return GroupElement(std::vector<std::int64_t>(coords.begin(), coords.end()));
}

GroupElement Group::word(std::span<const std::int64_t> letters) const {
  if (descriptor_.family() != Family::kFree) throw DescriptorMismatch("word on non-free group");
  std::vector<std::int64_t> out;
  for (auto l : letters) {
    if (l == 0 || std::llabs(l) > descriptor_.rank()) throw InvalidArgument("letter out of range");
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return GroupElement(std::move(out));
}

GroupElement Group::lamp_state(std::span<const std::int64_t> position,
                               std::vector<std::vector<std::int64_t>> lamps) const {
  const auto d = static_cast<std::size_t>(descriptor_.rank());
  if (descriptor_.family() != Family::kLamplighter || position.size() != d) {
    throw DescriptorMismatch("lamp state of wrong shape");
  }
  for (const auto& l : lamps) {
    if (l.size() != d) throw DescriptorMismatch("lamp coordinate of wrong rank");
  }
  std::sort(lamps.begin(), lamps.end());
  // A lamp listed twice is toggled twice.
  std::vector<Lamp> uniq;
  for (std::size_t i = 0; i < lamps.size();) {
    std::size_t j = i;
    while (j < lamps.size() && lamps[j] == lamps[i]) ++j;
    if ((j - i) % 2 == 1) uniq.push_back(lamps[i]);
    i = j;
  }
  return pack_lamp(std::vector<std::int64_t>(position.begin(), position.end()), uniq);
}

GroupElement Group::pair(const GroupElement& left, const GroupElement& right) const {
  std::vector<std::int64_t> code;
  code.reserve(1 + left.code().size() + right.code().size());
  code.push_back(static_cast<std::int64_t>(left.code().size()));
  code.insert(code.end(), left.code().begin(), left.code().end());
  code.insert(code.end(), right.code().begin(), right.code().end());
  return GroupElement(std::move(code));
}

std::pair<GroupElement, GroupElement> Group::split(const GroupElement& a) const {
  auto c = a.code();
  if (c.empty() || c[0] < 0 || static_cast<std::size_t>(c[0]) + 1 > c.size()) {
    throw DescriptorMismatch("malformed product element");
  }
  auto mid = c.begin() + 1 + c[0];
  return {GroupElement(std::vector<std::int64_t>(c.begin() + 1, mid)),
          GroupElement(std::vector<std::int64_t>(mid, c.end()))};
}

// ---------------------------------------------------------------------- text
//
// Grammar, per family ("e" is the identity everywhere):
//   lattice       (x1,...,xd); a bare integer is accepted when d = 1
//   free          letters joined by optional '*', each with optional ^k;
//                 a,b,c,d,f,... are generators (e is skipped) and the
//                 upper-case letter is the inverse. Input is reduced, so
//                 "aA" parses to e.
//   lamplighter   (pos,{lamp,...}) with pos and lamps as lattice tuples
//   product       [left;right]

GroupElement Group::parse(std::string_view text) const {
  std::size_t p = 0;
  auto g = parse_at(text, p);
  skip_ws(text, p);
  if (p != text.size()) {
    throw ParseError("trailing text in \"" + std::string(text) + "\"");
  }
  return g;
}

GroupElement Group::parse_at(std::string_view s, std::size_t& p) const {
  skip_ws(s, p);
  const int d = descriptor_.rank();
  if (p < s.size() && s[p] == 'e' && descriptor_.family() != Family::kFree) {
    ++p;
    return identity();
  }
  switch (descriptor_.family()) {
    case Family::kTrivial:
      throw ParseError("trivial group has only \"e\"");
    case Family::kLattice:
      return GroupElement(parse_tuple(s, p, d));
    case Family::kFree: {
      std::vector<std::int64_t> letters;
      bool any = false;
      while (true) {
        skip_ws(s, p);
        if (p >= s.size() || !std::isalpha(static_cast<unsigned char>(s[p]))) break;
        char c = s[p++];
        any = true;
        if (c == 'e') continue;
        char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        auto idx = kFreeAlphabet.find(lower);
        if (idx == std::string_view::npos || static_cast<int>(idx) >= d) {
          throw ParseError(std::string("unknown generator '") + c + "'");
        }
        std::int64_t letter = static_cast<std::int64_t>(idx) + 1;
        if (c != lower) letter = -letter;
        std::int64_t power = 1;
        if (consume(s, p, '^')) power = parse_int(s, p);
        if (power < 0) {
          letter = -letter;
          power = -power;
        }
        for (std::int64_t k = 0; k < power; ++k) letters.push_back(letter);
        std::size_t save = p;
        if (!consume(s, p, '*')) p = save;
      }
      if (!any) throw ParseError("empty free-group word in \"" + std::string(s) + "\"");
      return word(letters);
    }
    case Family::kLamplighter: {
      expect(s, p, '(');
      auto pos = parse_tuple(s, p, d);
      expect(s, p, ',');
      expect(s, p, '{');
      std::vector<Lamp> lamps;
      if (!consume(s, p, '}')) {
        lamps.push_back(parse_tuple(s, p, d));
        while (consume(s, p, ',')) lamps.push_back(parse_tuple(s, p, d));
        expect(s, p, '}');
      }
      expect(s, p, ')');
      return lamp_state(pos, std::move(lamps));
    }
    case Family::kProduct: {
      expect(s, p, '[');
      auto l = left_->parse_at(s, p);
      expect(s, p, ';');
      auto r = right_->parse_at(s, p);
      expect(s, p, ']');
      return pair(l, r);
    }
  }
  throw ParseError("unsupported family");
}

std::string Group::format(const GroupElement& a) const {
  auto c = a.code();
  const int d = descriptor_.rank();
  switch (descriptor_.family()) {
    case Family::kTrivial:
      return "e";
    case Family::kLattice:
      return format_tuple(c, false);
    case Family::kFree: {
      if (c.empty()) return "e";
      std::string out;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += '*';
        char ch = kFreeAlphabet[std::llabs(c[i]) - 1];
        out += c[i] > 0 ? ch : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      }
      return out;
    }
    case Family::kLamplighter: {
      auto v = unpack_lamp(c, d);
      std::string out = "(" + format_tuple(v.pos, true) + ",{";
      for (std::size_t i = 0; i < v.lamps.size(); ++i) {
        if (i) out += ',';
        out += format_tuple(v.lamps[i], true);
      }
      return out + "})";
    }
    case Family::kProduct: {
      auto [l, r] = split(a);
      return "[" + left_->format(l) + ";" + right_->format(r) + "]";
    }
  }
  return "?";
}

}  // namespace walkbench
