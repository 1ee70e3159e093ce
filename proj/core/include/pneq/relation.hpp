#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pneq/multiset.hpp"

namespace pneq {

enum class Side { left, right };

/// Boolean relation over places plus a reserved dummy index for the empty
/// marking. Plain-kind relations never relate the dummy index to anything;
/// dummy-kind relations may. The (dummy, dummy) pair is never stored: it is
/// implicit in both closures.
class PlaceRelation {
 public:
  enum class Kind { plain, dummy };

  PlaceRelation() = default;
  PlaceRelation(Kind kind, std::size_t place_count);

  static PlaceRelation identity(Kind kind, std::size_t place_count);

  Kind kind() const { return kind_; }
  std::size_t place_count() const { return place_count_; }
  /// Index standing for the empty marking; equals place_count().
  std::uint32_t theta() const { return static_cast<std::uint32_t>(place_count_); }

  bool contains(std::uint32_t a, std::uint32_t b) const;
  /// contains(), plus the implicit (theta, theta) pair.
  bool relates(std::uint32_t a, std::uint32_t b) const;
  /// Adding (theta, theta) is a no-op; theta in a plain relation is an error.
  void add(std::uint32_t a, std::uint32_t b);
  void remove(std::uint32_t a, std::uint32_t b);

  std::size_t pair_count() const;
  /// Stored pairs in row-major index order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs() const;

  bool row_empty(std::uint32_t a) const;
  bool column_empty(std::uint32_t b) const;

  bool subset_of(const PlaceRelation& other) const;
  PlaceRelation inversed() const;
  /// Relational composition; kinds and place counts must match. The implicit
  /// (theta, theta) pair participates as a middle element.
  PlaceRelation composed_with(const PlaceRelation& other) const;
  /// Reinterprets a plain relation as dummy-kind (same pairs).
  PlaceRelation lifted_to_dummy() const;

  /// Packed bit matrix, for hashing and visited sets.
  const std::vector<std::uint64_t>& words() const { return bits_; }

  bool operator==(const PlaceRelation& other) const = default;

 private:
  std::size_t cell(std::uint32_t a, std::uint32_t b) const;

  Kind kind_ = Kind::plain;
  std::size_t place_count_ = 0;
  std::size_t dim_ = 1;  // place_count_ + 1, theta included
  std::vector<std::uint64_t> bits_;
};

struct PlaceRelationHash {
  std::size_t operator()(const PlaceRelation& r) const;
};

/// Multiset of index pairs proving membership of a marking pair in a
/// closure: left components (theta dropped) sum to the left marking, right
/// components to the right one, and every pair is in the relation.
struct PairingWitness {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

  void add(std::uint32_t a, std::uint32_t b);
  void normalize();

  bool operator==(const PairingWitness& other) const = default;
};

/// Decides (left, right) membership in the additive closure (plain kind) or
/// the d-additive closure (dummy kind), returning a pairing witness on
/// success. Reduces to a capacity-weighted bipartite matching; for the plain
/// kind, differing sizes fail immediately.
std::optional<PairingWitness> closure_contains(const PlaceRelation& relation,
                                               const Multiset& left,
                                               const Multiset& right);

/// All markings related to `marking` through the additive closure, with
/// `marking` sitting on the given side. Plain kind only.
std::vector<Multiset> related_markings(const PlaceRelation& relation,
                                       const Multiset& marking, Side side);

/// All markings obtained by replacing each token of `marking` with one of
/// its partners (possibly theta, which drops the token), together with the
/// pairing used. Never introduces pairs with theta on `marking`'s side, so
/// the set is finite. Dummy kind only.
std::vector<std::pair<Multiset, PairingWitness>> substitution_images(
    const PlaceRelation& relation, const Multiset& marking, Side side);

/// Unique markings from substitution_images (or related_markings for plain
/// relations), sorted canonically.
std::vector<Multiset> image_markings(const PlaceRelation& relation,
                                     const Multiset& marking, Side side);

/// Every multiset of pairs whose left components (theta dropped) compose
/// `left` and right components compose `right`, drawing pairs from the full
/// index universe. Used to seed and branch the witness search.
std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>
enumerate_pairings(std::size_t place_count, bool allow_theta,
                   const Multiset& left, const Multiset& right);

}  // namespace pneq
