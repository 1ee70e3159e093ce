#include "pneq/multiset.hpp"

#include <algorithm>
#include <atomic>

#include "pneq/errors.hpp"

namespace pneq {

namespace {
std::atomic<std::uint64_t> g_multiplicity_cap{0xFFFFFFFFull};

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t cap = multiplicity_cap();
  if (a > cap || b > cap - a) {
    throw OverflowError("multiplicity overflow: sum exceeds cap");
  }
  return a + b;
}
}  // namespace

std::uint64_t multiplicity_cap() {
  return g_multiplicity_cap.load(std::memory_order_relaxed);
}

void set_multiplicity_cap(std::uint64_t cap) {
  g_multiplicity_cap.store(cap, std::memory_order_relaxed);
}

Multiset::Multiset(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  for (const auto& [index, count] : entries) {
    if (count > 0) add(index, count);
  }
}

Multiset Multiset::single(Index index, Count count) {
  Multiset m;
  if (count > 0) m.add(index, count);
  return m;
}

Multiset::Count Multiset::count(Index index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, Index i) { return e.first < i; });
  return (it != entries_.end() && it->first == index) ? it->second : 0;
}

Multiset::Count Multiset::size() const {
  Count total = 0;
  for (const auto& [index, count] : entries_) total += count;
  return total;
}

bool Multiset::subset_of(const Multiset& other) const {
  auto it = other.entries_.begin();
  for (const auto& [index, count] : entries_) {
    while (it != other.entries_.end() && it->first < index) ++it;
    if (it == other.entries_.end() || it->first != index || it->second < count) {
      return false;
    }
  }
  return true;
}

Multiset Multiset::plus(const Multiset& other) const {
  Multiset result;
  result.entries_.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      result.entries_.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      result.entries_.push_back(*b++);
    } else {
      result.entries_.emplace_back(a->first, checked_add(a->second, b->second));
      ++a;
      ++b;
    }
  }
  return result;
}

Multiset Multiset::minus(const Multiset& other) const {
  Multiset result;
  result.entries_.reserve(entries_.size());
  auto b = other.entries_.begin();
  for (const auto& [index, count] : entries_) {
    while (b != other.entries_.end() && b->first < index) ++b;
    Count sub = (b != other.entries_.end() && b->first == index) ? b->second : 0;
    if (count > sub) result.entries_.emplace_back(index, count - sub);
  }
  return result;
}

Multiset Multiset::scaled(Count factor) const {
  Multiset result;
  if (factor == 0) return result;
  const std::uint64_t cap = multiplicity_cap();
  result.entries_.reserve(entries_.size());
  for (const auto& [index, count] : entries_) {
    if (count > cap / factor) {
      throw OverflowError("multiplicity overflow: scalar product exceeds cap");
    }
    result.entries_.emplace_back(index, count * factor);
  }
  return result;
}

void Multiset::add(Index index, Count count) {
  if (count == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, Index i) { return e.first < i; });
  if (it != entries_.end() && it->first == index) {
    it->second = checked_add(it->second, count);
  } else {
    if (count > multiplicity_cap()) {
      throw OverflowError("multiplicity overflow: count exceeds cap");
    }
    entries_.insert(it, {index, count});
  }
}

void Multiset::remove(Index index, Count count) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, Index i) { return e.first < i; });
  if (it == entries_.end() || it->first != index) return;
  if (it->second > count) {
    it->second -= count;
  } else {
    entries_.erase(it);
  }
}

std::strong_ordering Multiset::operator<=>(const Multiset& other) const {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < entries_.size() && j < other.entries_.size()) {
    const auto& [pi, ci] = entries_[i];
    const auto& [pj, cj] = other.entries_[j];
    if (pi != pj) return pi <=> pj;
    if (ci == cj) {
      ++i;
      ++j;
      continue;
    }
    // Same index, different counts: the side with more copies keeps emitting
    // this index while the other side moves on to a larger one (or ends,
    // making it a proper prefix and thus smaller).
    if (ci > cj) {
      return (j + 1 == other.entries_.size()) ? std::strong_ordering::greater
                                              : std::strong_ordering::less;
    }
    return (i + 1 == entries_.size()) ? std::strong_ordering::less
                                      : std::strong_ordering::greater;
  }
  if (i < entries_.size()) return std::strong_ordering::greater;
  if (j < other.entries_.size()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

Multiset operator+(const Multiset& a, const Multiset& b) { return a.plus(b); }
Multiset operator-(const Multiset& a, const Multiset& b) { return a.minus(b); }

std::size_t MultisetHash::operator()(const Multiset& m) const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [index, count] : m.entries()) {
    h = (h ^ index) * 1099511628211ull;
    h = (h ^ count) * 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace pneq
