#include "pneq/decide.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <thread>
#include <unordered_set>

#include "pneq/errors.hpp"

namespace pneq {

namespace {

using Clock = std::chrono::steady_clock;

struct BudgetHit {};

struct MatrixShape {
  std::size_t dim;   // matrix side: n for plain, n+1 for dummy
  std::size_t bits;  // candidate bits; the (theta,theta) cell is excluded
};

MatrixShape shape_for(const Net& net, BisimKind kind) {
  std::size_t n = net.place_count();
  if (kind_uses_dummy(kind)) return {n + 1, (n + 1) * (n + 1) - 1};
  return {n, n * n};
}

PlaceRelation decode_pattern(const Net& net, BisimKind kind, const MatrixShape& shape,
                             std::uint64_t pattern) {
  PlaceRelation r(kind_uses_dummy(kind) ? PlaceRelation::Kind::dummy
                                        : PlaceRelation::Kind::plain,
                  net.place_count());
  while (pattern) {
    int k = std::countr_zero(pattern);
    pattern &= pattern - 1;
    r.add(static_cast<std::uint32_t>(k / shape.dim),
          static_cast<std::uint32_t>(k % shape.dim));
  }
  return r;
}

std::uint64_t next_same_popcount(std::uint64_t x) {
  std::uint64_t c = x & (~x + 1);
  std::uint64_t r = x + c;
  return r | ((x ^ r) >> (2 + std::countr_zero(x)));
}

// Necessary condition for (left, right) to have any pairing inside the
// candidate: every token's place needs at least one partner bit set.
struct SeedMasks {
  std::vector<std::uint64_t> row_masks;  // per left-support place
  std::vector<std::uint64_t> col_masks;  // per right-support place

  bool plausible(std::uint64_t pattern) const {
    for (std::uint64_t m : row_masks) {
      if (!(pattern & m)) return false;
    }
    for (std::uint64_t m : col_masks) {
      if (!(pattern & m)) return false;
    }
    return true;
  }
};

SeedMasks seed_masks(const MatrixShape& shape, const Multiset& left,
                     const Multiset& right) {
  SeedMasks masks;
  auto bit_of = [&](std::size_t u, std::size_t v) -> std::uint64_t {
    std::size_t k = u * shape.dim + v;
    return k < shape.bits ? (1ull << k) : 0;
  };
  for (const auto& [p, c] : left.entries()) {
    std::uint64_t m = 0;
    for (std::size_t v = 0; v < shape.dim; ++v) m |= bit_of(p, v);
    masks.row_masks.push_back(m);
  }
  for (const auto& [q, c] : right.entries()) {
    std::uint64_t m = 0;
    for (std::size_t u = 0; u < shape.dim; ++u) m |= bit_of(u, q);
    masks.col_masks.push_back(m);
  }
  return masks;
}

struct ExhaustiveShared {
  std::atomic<std::uint64_t> best{~0ull};
  std::atomic<std::uint64_t> examined{0};
  std::atomic<bool> budget_hit{false};
};

void exhaustive_scan_range(const Net& net, BisimKind kind, const MatrixShape& shape,
                           const Multiset& left, const Multiset& right,
                           const SeedMasks& masks, std::uint64_t lo, std::uint64_t hi,
                           const Budget& budget, Clock::time_point deadline,
                           bool has_deadline, ExhaustiveShared& shared) {
  for (std::uint64_t pattern = lo; pattern < hi; ++pattern) {
    if ((pattern & 0x3FF) == 0) {
      if (pattern > shared.best.load(std::memory_order_relaxed)) return;
      if (has_deadline && Clock::now() > deadline) {
        shared.budget_hit.store(true);
        return;
      }
      if (shared.budget_hit.load(std::memory_order_relaxed)) return;
    }
    std::uint64_t seen = shared.examined.fetch_add(1, std::memory_order_relaxed) + 1;
    if (budget.max_relations && seen > *budget.max_relations) {
      shared.budget_hit.store(true);
      return;
    }
    if (!masks.plausible(pattern)) continue;
    PlaceRelation r = decode_pattern(net, kind, shape, pattern);
    if (!closure_contains(r, left, right)) continue;
    if (!verify(net, r, kind).accepted) continue;
    std::uint64_t cur = shared.best.load();
    while (pattern < cur && !shared.best.compare_exchange_weak(cur, pattern)) {
    }
    return;
  }
}

Verdict decide_exhaustive(const Net& net, BisimKind kind, const Multiset& left,
                          const Multiset& right, const DecideOptions& options) {
  Verdict verdict;
  verdict.strategy = Strategy::exhaustive;
  MatrixShape shape = shape_for(net, kind);
  if (shape.bits > 36) {
    throw TooLargeError("exhaustive strategy infeasible for " +
                        std::to_string(net.place_count()) +
                        " places; use saturation");
  }
  const std::uint64_t limit = 1ull << shape.bits;
  SeedMasks masks = seed_masks(shape, left, right);
  const bool has_deadline = options.budget.time_limit.has_value();
  Clock::time_point deadline =
      has_deadline ? Clock::now() + *options.budget.time_limit : Clock::time_point{};

  ExhaustiveShared shared;
  if (options.threads > 1 || options.canonical) {
    // Ascending numeric scan; the reported witness is the least accepting
    // pattern, which is also deterministic under parallel scanning.
    unsigned workers = std::max(1u, options.threads);
    std::uint64_t chunk = (limit + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      std::uint64_t lo = w * chunk;
      std::uint64_t hi = std::min(limit, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        exhaustive_scan_range(net, kind, shape, left, right, masks, lo, hi,
                              options.budget, deadline, has_deadline, shared);
      });
    }
    for (auto& t : pool) t.join();
  } else {
    // Population-count order: witnesses are typically small relations.
    for (std::size_t count = 0;
         count <= shape.bits && shared.best.load() == ~0ull && !shared.budget_hit;
         ++count) {
      if (count == 0) {
        exhaustive_scan_range(net, kind, shape, left, right, masks, 0, 1,
                              options.budget, deadline, has_deadline, shared);
        continue;
      }
      std::uint64_t pattern = (1ull << count) - 1;
      while (pattern < limit) {
        exhaustive_scan_range(net, kind, shape, left, right, masks, pattern,
                              pattern + 1, options.budget, deadline, has_deadline,
                              shared);
        if (shared.best.load() != ~0ull || shared.budget_hit) break;
        std::uint64_t next = next_same_popcount(pattern);
        if (next <= pattern) break;
        pattern = next;
      }
    }
  }

  verdict.relations_examined = shared.examined.load();
  std::uint64_t best = shared.best.load();
  if (best != ~0ull) {
    verdict.outcome = Verdict::Outcome::equivalent;
    verdict.witness = decode_pattern(net, kind, shape, best);
    verdict.pairing = closure_contains(*verdict.witness, left, right);
  } else if (shared.budget_hit.load()) {
    verdict.outcome = Verdict::Outcome::budget_exceeded;
  } else {
    verdict.outcome = Verdict::Outcome::not_equivalent;
  }
  return verdict;
}

struct SaturationSearch {
  const Net& net;
  BisimKind kind;
  bool dummy;
  const Budget& budget;
  Clock::time_point deadline;
  bool has_deadline;
  std::uint64_t examined = 0;
  std::unordered_set<PlaceRelation, PlaceRelationHash> visited;
  std::optional<PlaceRelation> witness;

  void charge() {
    ++examined;
    if (budget.max_relations && examined > *budget.max_relations) throw BudgetHit{};
    if (has_deadline && (examined & 0xFF) == 0 && Clock::now() > deadline) {
      throw BudgetHit{};
    }
  }

  // Candidate answers for an unmet obligation: answering transition plus the
  // pair additions making each required closure membership hold. Conditions
  // already satisfied stay satisfied (the closure is monotone in R).
  bool fix(const PlaceRelation& r, const Obligation& ob) {
    const Transition& chal = net.transition(ob.transition);
    const std::size_t n = net.place_count();
    for (std::uint32_t a = 0; a < net.transition_count(); ++a) {
      const Transition& ans = net.transition(a);
      if (ans.label != chal.label) continue;

      std::vector<std::pair<Multiset, Multiset>> conditions;
      if (kind == BisimKind::place) {
        if (ans.pre != ob.marking) continue;
        conditions.push_back(ob.side == Side::left
                                 ? std::pair{chal.post, ans.post}
                                 : std::pair{ans.post, chal.post});
      } else {
        if (!ans.pre.subset_of(ob.marking)) continue;
        Multiset reached = ob.marking.minus(ans.pre).plus(ans.post);
        if (kind == BisimKind::dplace) {
          if (ob.side == Side::left) {
            conditions = {{chal.pre, ans.pre}, {chal.post, ans.post}, {chal.post, reached}};
          } else {
            conditions = {{ans.pre, chal.pre}, {ans.post, chal.post}, {reached, chal.post}};
          }
        } else {
          conditions.push_back(ob.side == Side::left ? std::pair{chal.post, reached}
                                                     : std::pair{reached, chal.post});
        }
      }

      std::vector<std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>>
          choices;
      bool feasible = true;
      for (const auto& [cl, cr] : conditions) {
        if (closure_contains(r, cl, cr)) {
          choices.push_back({{}});
          continue;
        }
        auto pairings = enumerate_pairings(n, dummy, cl, cr);
        if (pairings.empty()) {
          feasible = false;
          break;
        }
        choices.push_back(std::move(pairings));
      }
      if (!feasible) continue;

      std::vector<std::size_t> pick(choices.size(), 0);
      while (true) {
        PlaceRelation extended = r;
        for (std::size_t c = 0; c < choices.size(); ++c) {
          for (const auto& [x, y] : choices[c][pick[c]]) extended.add(x, y);
        }
        if (extended != r && search(extended)) return true;

        std::size_t c = 0;
        while (c < pick.size() && ++pick[c] == choices[c].size()) {
          pick[c] = 0;
          ++c;
        }
        if (c == pick.size()) break;
      }
    }
    return false;
  }

  bool search(const PlaceRelation& r) {
    if (!visited.insert(r).second) return false;
    charge();
    CheckReport report = verify(net, r, kind, false);
    if (report.accepted) {
      witness = r;
      return true;
    }
    return fix(r, report.violations.front());
  }
};

Verdict decide_saturation(const Net& net, BisimKind kind, const Multiset& left,
                          const Multiset& right, const DecideOptions& options) {
  Verdict verdict;
  verdict.strategy = Strategy::saturation;
  const bool dummy = kind_uses_dummy(kind);
  const bool has_deadline = options.budget.time_limit.has_value();
  SaturationSearch search{
      net,
      kind,
      dummy,
      options.budget,
      has_deadline ? Clock::now() + *options.budget.time_limit : Clock::time_point{},
      has_deadline};

  try {
    // One branch per initial token pairing of (left, right); distinct
    // pairings may share a support relation, deduplicated via `visited`.
    for (const auto& pairing : enumerate_pairings(net.place_count(), dummy, left, right)) {
      PlaceRelation seed(dummy ? PlaceRelation::Kind::dummy : PlaceRelation::Kind::plain,
                         net.place_count());
      for (const auto& [a, b] : pairing) seed.add(a, b);
      if (search.search(seed)) break;
    }
  } catch (const BudgetHit&) {
    verdict.relations_examined = search.examined;
    verdict.outcome = Verdict::Outcome::budget_exceeded;
    return verdict;
  }

  verdict.relations_examined = search.examined;
  if (search.witness) {
    verdict.outcome = Verdict::Outcome::equivalent;
    verdict.witness = std::move(search.witness);
    verdict.pairing = closure_contains(*verdict.witness, left, right);
  }
  return verdict;
}

}  // namespace

Verdict decide(const Net& net, BisimKind kind, const Multiset& left,
               const Multiset& right, const DecideOptions& options) {
  if (!kind_uses_dummy(kind) && left.size() != right.size()) {
    Verdict verdict;
    verdict.strategy = options.strategy;
    verdict.outcome = Verdict::Outcome::not_equivalent;
    return verdict;
  }
  return options.strategy == Strategy::exhaustive
             ? decide_exhaustive(net, kind, left, right, options)
             : decide_saturation(net, kind, left, right, options);
}

void enumerate_bisimulations(const Net& net, BisimKind kind,
                             const std::function<bool(const PlaceRelation&)>& yield,
                             std::size_t max_index_set) {
  std::size_t index_set = net.place_count() + (kind_uses_dummy(kind) ? 1 : 0);
  if (index_set > max_index_set) {
    throw TooLargeError("relation enumeration refused: index set of " +
                        std::to_string(index_set) + " exceeds cap " +
                        std::to_string(max_index_set));
  }
  MatrixShape shape = shape_for(net, kind);
  const std::uint64_t limit = shape.bits >= 64 ? 0 : (1ull << shape.bits);
  for (std::uint64_t pattern = 0; pattern < limit || (pattern == 0 && limit == 1);
       ++pattern) {
    PlaceRelation r = decode_pattern(net, kind, shape, pattern);
    if (verify(net, r, kind).accepted) {
      if (!yield(r)) return;
    }
    if (pattern + 1 == limit) break;
  }
}

std::vector<PlaceRelation> enumerate_bisimulations(const Net& net, BisimKind kind,
                                                   std::size_t max_index_set) {
  std::vector<PlaceRelation> out;
  enumerate_bisimulations(
      net, kind,
      [&](const PlaceRelation& r) {
        out.push_back(r);
        return true;
      },
      max_index_set);
  return out;
}

std::vector<PlaceRelation> maximal_bisimulations(const Net& net, BisimKind kind,
                                                 std::size_t max_index_set) {
  std::vector<PlaceRelation> accepted = enumerate_bisimulations(net, kind, max_index_set);
  std::vector<PlaceRelation> maximal;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < accepted.size() && !dominated; ++j) {
      dominated = i != j && accepted[i] != accepted[j] && accepted[i].subset_of(accepted[j]);
    }
    if (!dominated) maximal.push_back(accepted[i]);
  }
  return maximal;
}

PlaceRelation extend_to_maximal(const Net& net, BisimKind kind, PlaceRelation relation) {
  const auto theta = relation.theta();
  const bool dummy = relation.kind() == PlaceRelation::Kind::dummy;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t a = 0; a <= theta; ++a) {
      for (std::uint32_t b = 0; b <= theta; ++b) {
        if (a == theta && b == theta) continue;
        if (!dummy && (a == theta || b == theta)) continue;
        if (relation.contains(a, b)) continue;
        PlaceRelation extended = relation;
        extended.add(a, b);
        if (verify(net, extended, kind).accepted) {
          relation = std::move(extended);
          changed = true;
        }
      }
    }
  }
  return relation;
}

}  // namespace pneq
