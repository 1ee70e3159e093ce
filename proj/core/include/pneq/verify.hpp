#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pneq/multiset.hpp"
#include "pneq/net.hpp"
#include "pneq/relation.hpp"

namespace pneq {

enum class BisimKind { place, dplace, iplace, idplace };

/// d-variants run on dummy-kind relations, the others on plain ones.
bool kind_uses_dummy(BisimKind kind);
const char* kind_name(BisimKind kind);
std::optional<BisimKind> kind_from_name(std::string_view name);

/// A challenger move the relation under test failed to answer: `marking` is
/// closure-related to the pre-set of `transition` (on the challenger's
/// side), and no transition answers it per the kind's conditions.
struct Obligation {
  Side side = Side::left;
  std::uint32_t transition = 0;
  Multiset marking;

  bool operator==(const Obligation& other) const = default;
};

struct CheckReport {
  bool accepted = false;
  BisimKind kind = BisimKind::place;
  std::vector<Obligation> violations;  // empty iff accepted
};

/// Decides whether `relation` is a bisimulation of the given kind by the
/// finite per-transition conditions. With `all_violations` the full
/// canonically-ordered violation list is produced; otherwise the first
/// violation short-circuits.
CheckReport verify(const Net& net, const PlaceRelation& relation, BisimKind kind,
                   bool all_violations = false);

CheckReport verify_place(const Net& net, const PlaceRelation& relation,
                         bool all_violations = false);
CheckReport verify_dplace(const Net& net, const PlaceRelation& relation,
                          bool all_violations = false);
CheckReport verify_iplace(const Net& net, const PlaceRelation& relation,
                          bool all_violations = false);
CheckReport verify_idplace(const Net& net, const PlaceRelation& relation,
                           bool all_violations = false);

}  // namespace pneq
