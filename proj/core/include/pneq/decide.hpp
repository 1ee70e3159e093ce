#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pneq/multiset.hpp"
#include "pneq/net.hpp"
#include "pneq/relation.hpp"
#include "pneq/verify.hpp"

namespace pneq {

enum class Strategy { exhaustive, saturation };

struct Budget {
  std::optional<std::uint64_t> max_relations;
  std::optional<std::chrono::milliseconds> time_limit;
};

struct DecideOptions {
  Strategy strategy = Strategy::saturation;
  Budget budget;
  /// Exhaustive only: report the least accepting relation in bit-pattern
  /// order instead of the first one found.
  bool canonical = false;
  /// Exhaustive only: number of worker threads scanning candidates. The
  /// verdict is schedule-independent; so is the witness (least pattern).
  unsigned threads = 1;
};

struct Verdict {
  enum class Outcome { equivalent, not_equivalent, budget_exceeded };

  Outcome outcome = Outcome::not_equivalent;
  std::optional<PlaceRelation> witness;
  std::optional<PairingWitness> pairing;
  Strategy strategy = Strategy::saturation;
  std::uint64_t relations_examined = 0;

  bool equivalent() const { return outcome == Outcome::equivalent; }
};

/// Decides whether the markings are equivalent for the given kind: some
/// relation of the proper kind is accepted by verify() and closure-relates
/// them. The exhaustive strategy scans all place relations; saturation
/// grows candidate relations from token pairings of (left, right),
/// discharging unmet obligations with backtracking. Both agree on the
/// verdict.
Verdict decide(const Net& net, BisimKind kind, const Multiset& left,
               const Multiset& right, const DecideOptions& options = {});

/// Streams every accepted relation in ascending bit-pattern order. Refuses
/// (TooLargeError) when the index set exceeds `max_index_set`. The callback
/// returns false to stop early.
void enumerate_bisimulations(const Net& net, BisimKind kind,
                             const std::function<bool(const PlaceRelation&)>& yield,
                             std::size_t max_index_set = 5);
std::vector<PlaceRelation> enumerate_bisimulations(const Net& net, BisimKind kind,
                                                   std::size_t max_index_set = 5);

/// Accepted relations not strictly contained in another accepted relation.
std::vector<PlaceRelation> maximal_bisimulations(const Net& net, BisimKind kind,
                                                 std::size_t max_index_set = 5);

/// Grows an accepted relation pair-by-pair while acceptance is preserved.
/// The result admits no accepted single-pair extension; global maximality
/// would need full enumeration.
PlaceRelation extend_to_maximal(const Net& net, BisimKind kind, PlaceRelation relation);

}  // namespace pneq
