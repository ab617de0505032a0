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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace walkbench {

enum class Family { kTrivial, kLattice, kFree, kLamplighter, kProduct };

inline constexpr int kMaxProductDepth = 4;

/// Which group a walk lives on. Cheap to copy; product components are shared.
class GroupDescriptor {
 public:
  GroupDescriptor() = default;

  static GroupDescriptor trivial();
  static GroupDescriptor lattice(int d);
  static GroupDescriptor free_group(int s);
  static GroupDescriptor lamplighter(int d);
  static GroupDescriptor product(const GroupDescriptor& left,
                                 const GroupDescriptor& right);

  /// Accepts `trivial`, `lattice(d)`, `free(s)`, `lamplighter(d)` and
  /// `product(<desc>,<desc>)`.
  static GroupDescriptor parse(std::string_view text);

  Family family() const { return family_; }
  /// d for lattices and lamplighters, s for free groups, 0 otherwise.
  int rank() const { return rank_; }
  const GroupDescriptor& left() const;
  const GroupDescriptor& right() const;
  int product_depth() const;

  std::string to_string() const;

  friend bool operator==(const GroupDescriptor& a, const GroupDescriptor& b);

 private:
  Family family_ = Family::kTrivial;
  int rank_ = 0;
  std::shared_ptr<const GroupDescriptor> left_;
  std::shared_ptr<const GroupDescriptor> right_;
};

/// Immutable canonical encoding of a group element. The layout of `code`
/// depends on the descriptor:
///   lattice(d)      d coordinates
///   free(s)         reduced word, letter +i for a_i and -i for a_i^-1
///   lamplighter(d)  d position coordinates, then each lit lamp as a
///                   d-tuple, lamps sorted lexicographically and distinct
///   product         [len(left code), left code..., right code...]
/// Equality of codes is group equality under a fixed descriptor.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> code) : code_(std::move(code)) {}

  std::span<const std::int64_t> code() const { return code_; }
  std::size_t hash() const noexcept;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement& a, const GroupElement& b) {
    return a.code_ <=> b.code_;
  }

 private:
  std::vector<std::int64_t> code_;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept { return g.hash(); }
};

struct GroupOptions {
  /// BFS radius used by word_length for families without a native formula.
  int word_length_radius = 10;
  /// Maximum number of elements any single ball() call may produce.
  std::size_t ball_budget = 5'000'000;
};

/// Arithmetic, enumeration and text I/O for one descriptor. All members are
/// const and reentrant.
class Group {
 public:
  explicit Group(GroupDescriptor descriptor, GroupOptions options = {});

  const GroupDescriptor& descriptor() const { return descriptor_; }
  const GroupOptions& options() const { return options_; }

  GroupElement identity() const;
  bool is_identity(const GroupElement& a) const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  /// a^-1 b, the increment used by every transition probability.
  GroupElement relative(const GroupElement& a, const GroupElement& b) const {
    return multiply(inverse(a), b);
  }

  /// Standard symmetric generating set in the fixed generator order:
  /// lattice +e1,-e1,+e2,...; free a,A,b,B,...; lamplighter moves then the
  /// toggle at the current position; product left generators then right.
  const std::vector<GroupElement>& generators() const { return generators_; }

  /// Distance to e in the Cayley graph of generators().
  std::int64_t word_length(const GroupElement& a) const;

  /// Elements of word length <= radius in breadth-first discovery order
  /// (right multiplication by generators() in order). The result for radius
  /// r is a prefix of the result for r + 1; position in this list is phi.
  std::vector<GroupElement> ball(int radius) const;

  GroupElement parse(std::string_view text) const;
  std::string format(const GroupElement& a) const;

  /// Throws DescriptorMismatch if the code is not a canonical element.
  void validate(const GroupElement& a) const;

  // Family-specific constructors and accessors.
  GroupElement lattice_point(std::span<const std::int64_t> coords) const;
  GroupElement word(std::span<const std::int64_t> letters) const;  // reduces
  GroupElement lamp_state(std::span<const std::int64_t> position,
                          std::vector<std::vector<std::int64_t>> lamps) const;
  GroupElement pair(const GroupElement& left, const GroupElement& right) const;
  std::pair<GroupElement, GroupElement> split(const GroupElement& a) const;
  const Group& left() const;
  const Group& right() const;
  std::shared_ptr<const Group> left_ptr() const { return left_; }
  std::shared_ptr<const Group> right_ptr() const { return right_; }

 private:
  GroupElement parse_at(std::string_view text, std::size_t& pos) const;
  std::int64_t bfs_distance(const GroupElement& a) const;

  GroupDescriptor descriptor_;
  GroupOptions options_;
  std::shared_ptr<const Group> left_;
  std::shared_ptr<const Group> right_;
  std::vector<GroupElement> generators_;
};

/// Reduced length of a free-group code (the code is reduced already).
inline std::int64_t free_length(const GroupElement& a) {
  return static_cast<std::int64_t>(a.code().size());
}

}  // namespace walkbench
