#include "pneq/relation.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <queue>

#include "pneq/errors.hpp"

namespace pneq {

PlaceRelation::PlaceRelation(Kind kind, std::size_t place_count)
    : kind_(kind),
      place_count_(place_count),
      dim_(place_count + 1),
      bits_((dim_ * dim_ + 63) / 64, 0) {}

PlaceRelation PlaceRelation::identity(Kind kind, std::size_t place_count) {
  PlaceRelation r(kind, place_count);
  for (std::uint32_t s = 0; s < place_count; ++s) r.add(s, s);
  return r;
}

std::size_t PlaceRelation::cell(std::uint32_t a, std::uint32_t b) const {
  return static_cast<std::size_t>(a) * dim_ + b;
}

bool PlaceRelation::contains(std::uint32_t a, std::uint32_t b) const {
  if (a >= dim_ || b >= dim_) return false;
  std::size_t c = cell(a, b);
  return (bits_[c / 64] >> (c % 64)) & 1;
}

bool PlaceRelation::relates(std::uint32_t a, std::uint32_t b) const {
  if (a == theta() && b == theta()) return true;
  return contains(a, b);
}

void PlaceRelation::add(std::uint32_t a, std::uint32_t b) {
  if (a >= dim_ || b >= dim_) throw Error("relation index out of range");
  if (a == theta() && b == theta()) return;  // implicit in both closures
  if (kind_ == Kind::plain && (a == theta() || b == theta())) {
    throw Error("plain relation cannot relate theta");
  }
  std::size_t c = cell(a, b);
  bits_[c / 64] |= (1ull << (c % 64));
}

void PlaceRelation::remove(std::uint32_t a, std::uint32_t b) {
  if (a >= dim_ || b >= dim_) return;
  std::size_t c = cell(a, b);
  bits_[c / 64] &= ~(1ull << (c % 64));
}

std::size_t PlaceRelation::pair_count() const {
  std::size_t total = 0;
  for (std::uint64_t w : bits_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> PlaceRelation::pairs() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t a = 0; a < dim_; ++a) {
    for (std::uint32_t b = 0; b < dim_; ++b) {
      if (contains(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

bool PlaceRelation::row_empty(std::uint32_t a) const {
  for (std::uint32_t b = 0; b < dim_; ++b) {
    if (contains(a, b)) return false;
  }
  return true;
}

bool PlaceRelation::column_empty(std::uint32_t b) const {
  for (std::uint32_t a = 0; a < dim_; ++a) {
    if (contains(a, b)) return false;
  }
  return true;
}

bool PlaceRelation::subset_of(const PlaceRelation& other) const {
  if (place_count_ != other.place_count_) throw Error("relation sizes differ");
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] & ~other.bits_[i]) return false;
  }
  return true;
}

PlaceRelation PlaceRelation::inversed() const {
  PlaceRelation r(kind_, place_count_);
  for (std::uint32_t a = 0; a < dim_; ++a) {
    for (std::uint32_t b = 0; b < dim_; ++b) {
      if (contains(a, b)) r.add(b, a);
    }
  }
  return r;
}

PlaceRelation PlaceRelation::composed_with(const PlaceRelation& other) const {
  if (kind_ != other.kind_ || place_count_ != other.place_count_) {
    throw Error("cannot compose relations of different kind or size");
  }
  PlaceRelation r(kind_, place_count_);
  for (std::uint32_t a = 0; a < dim_; ++a) {
    for (std::uint32_t c = 0; c < dim_; ++c) {
      if (a == theta() && c == theta()) continue;
      for (std::uint32_t b = 0; b < dim_; ++b) {
        if (relates(a, b) && other.relates(b, c)) {
          r.add(a, c);
          break;
        }
      }
    }
  }
  return r;
}

PlaceRelation PlaceRelation::lifted_to_dummy() const {
  PlaceRelation r(Kind::dummy, place_count_);
  r.bits_ = bits_;
  return r;
}

std::size_t PlaceRelationHash::operator()(const PlaceRelation& r) const {
  std::uint64_t h = 1469598103934665603ull ^ r.place_count();
  for (std::uint64_t w : r.words()) h = (h ^ w) * 1099511628211ull;
  return static_cast<std::size_t>(h);
}

void PairingWitness::add(std::uint32_t a, std::uint32_t b) { pairs.emplace_back(a, b); }

void PairingWitness::normalize() { std::sort(pairs.begin(), pairs.end()); }

namespace {

// Dinic max-flow; capacities well beyond token counts.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : adjacency_(nodes) {}

  struct EdgeRef {
    int from;
    int index;
  };

  EdgeRef add_edge(int from, int to, std::int64_t cap) {
    adjacency_[from].push_back({to, cap, static_cast<int>(adjacency_[to].size())});
    adjacency_[to].push_back({from, 0, static_cast<int>(adjacency_[from].size()) - 1});
    return {from, static_cast<int>(adjacency_[from].size()) - 1};
  }

  std::int64_t flow_through(const EdgeRef& ref, std::int64_t original_cap) const {
    return original_cap - adjacency_[ref.from][ref.index].cap;
  }

  std::int64_t max_flow(int source, int sink) {
    std::int64_t total = 0;
    while (build_levels(source, sink)) {
      iter_.assign(adjacency_.size(), 0);
      while (std::int64_t pushed = augment(source, sink,
                                           std::numeric_limits<std::int64_t>::max())) {
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Edge {
    int to;
    std::int64_t cap;
    int rev;
  };

  bool build_levels(int source, int sink) {
    level_.assign(adjacency_.size(), -1);
    std::queue<int> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop();
      for (const Edge& e : adjacency_[v]) {
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          queue.push(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  std::int64_t augment(int v, int sink, std::int64_t limit) {
    if (v == sink) return limit;
    for (int& i = iter_[v]; i < static_cast<int>(adjacency_[v].size()); ++i) {
      Edge& e = adjacency_[v][i];
      if (e.cap <= 0 || level_[e.to] != level_[v] + 1) continue;
      std::int64_t pushed = augment(e.to, sink, std::min(limit, e.cap));
      if (pushed > 0) {
        e.cap -= pushed;
        adjacency_[e.to][e.rev].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> adjacency_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace

std::optional<PairingWitness> closure_contains(const PlaceRelation& relation,
                                               const Multiset& left,
                                               const Multiset& right) {
  const bool dummy = relation.kind() == PlaceRelation::Kind::dummy;
  if (!dummy && left.size() != right.size()) return std::nullopt;

  const auto& lefts = left.entries();
  const auto& rights = right.entries();
  const std::uint32_t theta = relation.theta();

  // Tokens of a place may go unmatched only if the relation pairs the place
  // with theta (on the proper side).
  std::vector<bool> left_optional(lefts.size()), right_optional(rights.size());
  for (std::size_t i = 0; i < lefts.size(); ++i) {
    left_optional[i] = dummy && relation.contains(lefts[i].first, theta);
  }
  for (std::size_t j = 0; j < rights.size(); ++j) {
    right_optional[j] = dummy && relation.contains(theta, rights[j].first);
  }

  // Matching with one capacity-weighted node per place; exact saturation
  // demands become flow lower bounds, eliminated by the standard
  // excess-node transformation over the circulation (T -> S closed).
  const int n_left = static_cast<int>(lefts.size());
  const int n_right = static_cast<int>(rights.size());
  const int source = 0, sink = 1;
  const int left_base = 2, right_base = 2 + n_left;
  const int super_source = right_base + n_right, super_sink = super_source + 1;
  FlowNetwork network(super_sink + 1);

  std::vector<std::int64_t> excess(super_source, 0);
  auto bounded_edge = [&](int from, int to, std::int64_t lower, std::int64_t upper) {
    excess[to] += lower;
    excess[from] -= lower;
    return network.add_edge(from, to, upper - lower);
  };

  for (int i = 0; i < n_left; ++i) {
    auto cap = static_cast<std::int64_t>(lefts[i].second);
    bounded_edge(source, left_base + i, left_optional[i] ? 0 : cap, cap);
  }
  for (int j = 0; j < n_right; ++j) {
    auto cap = static_cast<std::int64_t>(rights[j].second);
    bounded_edge(right_base + j, sink, right_optional[j] ? 0 : cap, cap);
  }

  std::vector<std::vector<std::pair<int, FlowNetwork::EdgeRef>>> pair_refs(n_left);
  std::vector<std::vector<std::int64_t>> pair_caps(n_left);
  for (int i = 0; i < n_left; ++i) {
    bool matchable = left_optional[i];
    for (int j = 0; j < n_right; ++j) {
      if (!relation.contains(lefts[i].first, rights[j].first)) continue;
      matchable = true;
      auto cap = static_cast<std::int64_t>(
          std::min(lefts[i].second, rights[j].second));
      pair_refs[i].emplace_back(j, network.add_edge(left_base + i, right_base + j, cap));
      pair_caps[i].push_back(cap);
    }
    if (!matchable) return std::nullopt;
  }
  for (int j = 0; j < n_right; ++j) {
    if (right_optional[j]) continue;
    bool matchable = false;
    for (int i = 0; i < n_left && !matchable; ++i) {
      matchable = relation.contains(lefts[i].first, rights[j].first);
    }
    if (!matchable) return std::nullopt;
  }

  network.add_edge(sink, source, std::numeric_limits<std::int64_t>::max() / 4);

  std::int64_t required = 0;
  for (int v = 0; v < super_source; ++v) {
    if (excess[v] > 0) {
      network.add_edge(super_source, v, excess[v]);
      required += excess[v];
    } else if (excess[v] < 0) {
      network.add_edge(v, super_sink, -excess[v]);
    }
  }
  if (network.max_flow(super_source, super_sink) != required) return std::nullopt;

  PairingWitness witness;
  for (int i = 0; i < n_left; ++i) {
    std::int64_t matched = 0;
    for (std::size_t k = 0; k < pair_refs[i].size(); ++k) {
      const auto& [j, ref] = pair_refs[i][k];
      std::int64_t f = network.flow_through(ref, pair_caps[i][k]);
      matched += f;
      for (std::int64_t c = 0; c < f; ++c) {
        witness.add(lefts[i].first, rights[j].first);
      }
    }
    for (std::int64_t c = matched; c < static_cast<std::int64_t>(lefts[i].second); ++c) {
      witness.add(lefts[i].first, theta);
    }
  }
  for (int j = 0; j < n_right; ++j) {
    std::int64_t covered = 0;
    for (int i = 0; i < n_left; ++i) {
      for (std::size_t k = 0; k < pair_refs[i].size(); ++k) {
        if (pair_refs[i][k].first == j) {
          covered += network.flow_through(pair_refs[i][k].second, pair_caps[i][k]);
        }
      }
    }
    for (std::int64_t c = covered; c < static_cast<std::int64_t>(rights[j].second); ++c) {
      witness.add(theta, rights[j].first);
    }
  }
  witness.normalize();
  return witness;
}

namespace {

// Token-wise substitution: every token of a place-run picks a partner, with
// partner choices per run enumerated as combinations with repetition so no
// pairing is produced twice.
void substitute_runs(const std::vector<std::vector<std::uint32_t>>& partners,
                     const std::vector<Multiset::Entry>& runs, std::size_t run,
                     std::uint32_t theta, Multiset& image, PairingWitness& pairing,
                     std::vector<std::pair<Multiset, PairingWitness>>& out) {
  if (run == runs.size()) {
    PairingWitness copy = pairing;
    copy.normalize();
    out.emplace_back(image, std::move(copy));
    return;
  }
  const auto& [place, count] = runs[run];
  const auto& choices = partners[run];

  // Distribute `count` tokens over the partner list (combinations with
  // repetition, so no pairing is visited twice).
  auto distribute = [&](auto&& self, std::size_t choice, Multiset::Count left) -> void {
    if (choice == choices.size()) {
      if (left == 0) substitute_runs(partners, runs, run + 1, theta, image, pairing, out);
      return;
    }
    for (Multiset::Count take = 0;; ++take) {
      self(self, choice + 1, left - take);
      if (take == left) break;
      if (choices[choice] != theta) image.add(choices[choice], 1);
      pairing.add(place, choices[choice]);
    }
    for (Multiset::Count c = 0; c < left; ++c) {
      if (choices[choice] != theta) image.remove(choices[choice], 1);
      pairing.pairs.pop_back();
    }
  };
  distribute(distribute, 0, count);
}

std::vector<std::pair<Multiset, PairingWitness>> substitute(
    const PlaceRelation& relation, const Multiset& marking, Side side,
    bool allow_theta) {
  const std::uint32_t theta = relation.theta();
  const auto& runs = marking.entries();
  std::vector<std::vector<std::uint32_t>> partners(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::uint32_t place = runs[i].first;
    for (std::uint32_t other = 0; other < theta; ++other) {
      bool related = side == Side::left ? relation.contains(place, other)
                                        : relation.contains(other, place);
      if (related) partners[i].push_back(other);
    }
    bool theta_ok = allow_theta && (side == Side::left
                                        ? relation.contains(place, theta)
                                        : relation.contains(theta, place));
    if (theta_ok) partners[i].push_back(theta);
    if (partners[i].empty()) return {};
  }
  std::vector<std::pair<Multiset, PairingWitness>> out;
  Multiset image;
  PairingWitness pairing;
  substitute_runs(partners, runs, 0, theta, image, pairing, out);

  // Witness pairs are recorded (marking place, partner); mirror them for the
  // right side so left components always come first.
  if (side == Side::right) {
    for (auto& [m, witness] : out) {
      for (auto& [a, b] : witness.pairs) std::swap(a, b);
      witness.normalize();
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second.pairs < y.second.pairs;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Multiset> related_markings(const PlaceRelation& relation,
                                       const Multiset& marking, Side side) {
  if (relation.kind() != PlaceRelation::Kind::plain) {
    throw Error("related_markings requires a plain relation");
  }
  auto images = substitute(relation, marking, side, false);
  std::vector<Multiset> out;
  out.reserve(images.size());
  for (auto& [image, witness] : images) out.push_back(std::move(image));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<Multiset, PairingWitness>> substitution_images(
    const PlaceRelation& relation, const Multiset& marking, Side side) {
  if (relation.kind() != PlaceRelation::Kind::dummy) {
    throw Error("substitution_images requires a dummy relation");
  }
  return substitute(relation, marking, side, true);
}

std::vector<Multiset> image_markings(const PlaceRelation& relation,
                                     const Multiset& marking, Side side) {
  if (relation.kind() == PlaceRelation::Kind::plain) {
    return related_markings(relation, marking, side);
  }
  auto images = substitution_images(relation, marking, side);
  std::vector<Multiset> out;
  out.reserve(images.size());
  for (auto& [image, witness] : images) out.push_back(std::move(image));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

void pairings_rec(std::size_t place_count, bool allow_theta,
                  const std::vector<Multiset::Entry>& runs, std::size_t run,
                  Multiset& remaining_right,
                  std::vector<std::pair<std::uint32_t, std::uint32_t>>& current,
                  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>& out) {
  const auto theta = static_cast<std::uint32_t>(place_count);
  if (run == runs.size()) {
    if (!allow_theta && !remaining_right.empty()) return;
    auto pairing = current;
    for (const auto& [place, count] : remaining_right.entries()) {
      for (Multiset::Count c = 0; c < count; ++c) pairing.emplace_back(theta, place);
    }
    std::sort(pairing.begin(), pairing.end());
    out.push_back(std::move(pairing));
    return;
  }
  const auto& [place, count] = runs[run];
  std::vector<std::uint32_t> candidates;
  for (const auto& [q, avail] : remaining_right.entries()) candidates.push_back(q);
  if (allow_theta) candidates.push_back(theta);

  auto distribute = [&](auto&& self, std::size_t choice, Multiset::Count left) -> void {
    if (choice == candidates.size()) {
      if (left == 0) {
        pairings_rec(place_count, allow_theta, runs, run + 1, remaining_right, current, out);
      }
      return;
    }
    std::uint32_t q = candidates[choice];
    Multiset::Count max_take =
        q == theta ? left : std::min(left, remaining_right.count(q));
    Multiset::Count taken = 0;
    for (Multiset::Count take = 0;; ++take) {
      self(self, choice + 1, left - take);
      if (take == max_take) break;
      if (q != theta) remaining_right.remove(q, 1);
      current.emplace_back(place, q);
      ++taken;
    }
    if (q != theta) remaining_right.add(q, taken);
    for (Multiset::Count c = 0; c < taken; ++c) current.pop_back();
  };
  distribute(distribute, 0, count);
}

}  // namespace

std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>
enumerate_pairings(std::size_t place_count, bool allow_theta, const Multiset& left,
                   const Multiset& right) {
  if (!allow_theta && left.size() != right.size()) return {};
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> current;
  Multiset remaining = right;
  pairings_rec(place_count, allow_theta, left.entries(), 0, remaining, current, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace pneq
