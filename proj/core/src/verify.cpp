#include "pneq/verify.hpp"

#include "pneq/errors.hpp"

namespace pneq {

bool kind_uses_dummy(BisimKind kind) {
  return kind == BisimKind::dplace || kind == BisimKind::idplace;
}

const char* kind_name(BisimKind kind) {
  switch (kind) {
    case BisimKind::place: return "place";
    case BisimKind::dplace: return "dplace";
    case BisimKind::iplace: return "iplace";
    case BisimKind::idplace: return "idplace";
  }
  return "?";
}

std::optional<BisimKind> kind_from_name(std::string_view name) {
  if (name == "place") return BisimKind::place;
  if (name == "dplace") return BisimKind::dplace;
  if (name == "iplace") return BisimKind::iplace;
  if (name == "idplace") return BisimKind::idplace;
  return std::nullopt;
}

namespace {

bool in_closure(const PlaceRelation& r, const Multiset& a, const Multiset& b) {
  return closure_contains(r, a, b).has_value();
}

// One challenger condition: challenger transition `chal` on `side`, image
// marking `m` on the opposite side. True iff some transition answers it.
bool answered(const Net& net, const PlaceRelation& r, BisimKind kind, Side side,
              const Transition& chal, const Multiset& m) {
  for (const Transition& ans : net.transitions()) {
    if (ans.label != chal.label) continue;
    switch (kind) {
      case BisimKind::place:
        // Equal closure sizes force the answering pre-set to be m itself.
        if (ans.pre != m) continue;
        if (side == Side::left ? in_closure(r, chal.post, ans.post)
                               : in_closure(r, ans.post, chal.post)) {
          return true;
        }
        continue;
      case BisimKind::dplace: {
        if (!ans.pre.subset_of(m)) continue;
        Multiset reached = m.minus(ans.pre).plus(ans.post);
        bool ok = side == Side::left
                      ? in_closure(r, chal.pre, ans.pre) &&
                            in_closure(r, chal.post, ans.post) &&
                            in_closure(r, chal.post, reached)
                      : in_closure(r, ans.pre, chal.pre) &&
                            in_closure(r, ans.post, chal.post) &&
                            in_closure(r, reached, chal.post);
        if (ok) return true;
        continue;
      }
      case BisimKind::iplace:
      case BisimKind::idplace: {
        if (!ans.pre.subset_of(m)) continue;
        Multiset reached = m.minus(ans.pre).plus(ans.post);
        bool ok = side == Side::left ? in_closure(r, chal.post, reached)
                                     : in_closure(r, reached, chal.post);
        if (ok) return true;
        continue;
      }
    }
  }
  return false;
}

}  // namespace

CheckReport verify(const Net& net, const PlaceRelation& relation, BisimKind kind,
                   bool all_violations) {
  const bool dummy = kind_uses_dummy(kind);
  if (dummy != (relation.kind() == PlaceRelation::Kind::dummy)) {
    throw Error(std::string("verify ") + kind_name(kind) + " expects a " +
                (dummy ? "dummy" : "plain") + "-kind relation");
  }
  if (relation.place_count() != net.place_count()) {
    throw Error("relation size does not match the net");
  }

  CheckReport report;
  report.kind = kind;
  for (std::uint32_t t = 0; t < net.transition_count(); ++t) {
    const Transition& chal = net.transition(t);
    for (Side side : {Side::left, Side::right}) {
      // The challenger's pre-set is substituted token-wise through the
      // relation; each image is a marking the other side must answer from.
      for (const Multiset& m : image_markings(relation, chal.pre, side)) {
        if (answered(net, relation, kind, side, chal, m)) continue;
        report.violations.push_back({side, t, m});
        if (!all_violations) {
          report.accepted = false;
          return report;
        }
      }
    }
  }
  report.accepted = report.violations.empty();
  return report;
}

CheckReport verify_place(const Net& net, const PlaceRelation& relation,
                         bool all_violations) {
  return verify(net, relation, BisimKind::place, all_violations);
}

CheckReport verify_dplace(const Net& net, const PlaceRelation& relation,
                          bool all_violations) {
  return verify(net, relation, BisimKind::dplace, all_violations);
}

CheckReport verify_iplace(const Net& net, const PlaceRelation& relation,
                          bool all_violations) {
  return verify(net, relation, BisimKind::iplace, all_violations);
}

CheckReport verify_idplace(const Net& net, const PlaceRelation& relation,
                           bool all_violations) {
  return verify(net, relation, BisimKind::idplace, all_violations);
}

}  // namespace pneq
