#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace pneq {

/// Cap on any single multiplicity. Sums beyond it raise OverflowError
/// instead of wrapping. Defaults to 2^32 - 1.
std::uint64_t multiplicity_cap();
void set_multiplicity_cap(std::uint64_t cap);

/// Finite multiset over dense indices (places, transitions, labels).
///
/// Entries are kept sorted by index with strictly positive counts, so the
/// default equality is structural and the empty multiset is the unique
/// representation of the empty marking.
class Multiset {
 public:
  using Index = std::uint32_t;
  using Count = std::uint64_t;
  using Entry = std::pair<Index, Count>;

  Multiset() = default;
  explicit Multiset(std::vector<Entry> entries);

  static Multiset single(Index index, Count count = 1);

  Count count(Index index) const;
  bool contains(Index index) const { return count(index) > 0; }

  /// Total number of tokens (the sum of all multiplicities).
  Count size() const;
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool subset_of(const Multiset& other) const;

  /// Componentwise sum; raises OverflowError past the multiplicity cap.
  Multiset plus(const Multiset& other) const;
  /// Componentwise difference truncated at zero.
  Multiset minus(const Multiset& other) const;
  /// Scalar product; factor 0 yields the empty multiset.
  Multiset scaled(Count factor) const;

  void add(Index index, Count count = 1);
  /// Removes up to `count` tokens of `index` (truncates at zero).
  void remove(Index index, Count count = 1);

  bool operator==(const Multiset& other) const = default;
  /// Lexicographic order on the expanded token sequence: {2*s1} < {s1,s2}.
  std::strong_ordering operator<=>(const Multiset& other) const;

 private:
  std::vector<Entry> entries_;
};

Multiset operator+(const Multiset& a, const Multiset& b);
Multiset operator-(const Multiset& a, const Multiset& b);

struct MultisetHash {
  std::size_t operator()(const Multiset& m) const;
};

}  // namespace pneq
