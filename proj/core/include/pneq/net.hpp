#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pneq/multiset.hpp"

namespace pneq {

/// A labeled net transition: nonempty pre-set, action label, post-set
/// (which may be empty).
struct Transition {
  std::string name;
  Multiset pre;
  std::uint32_t label = 0;
  Multiset post;

  bool operator==(const Transition& other) const = default;
};

/// Finite P/T net. Place, label and transition names are interned to dense
/// indices in declaration order; markings are multisets over place indices.
/// Nets are mutated only while being built and treated as immutable after.
class Net {
 public:
  Net() = default;

  /// Declares a place; names must be unique.
  std::uint32_t add_place(std::string name);
  /// Interns a label, reusing the index if already present.
  std::uint32_t add_label(std::string name);
  /// Adds a transition. An empty name auto-generates "t<k>". The pre-set
  /// must be nonempty and all place indices must be declared.
  std::uint32_t add_transition(std::string name, Multiset pre,
                               std::string_view label, Multiset post);

  std::size_t place_count() const { return places_.size(); }
  std::size_t label_count() const { return labels_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }

  const std::string& place_name(std::uint32_t index) const { return places_.at(index); }
  const std::string& label_name(std::uint32_t index) const { return labels_.at(index); }
  const Transition& transition(std::uint32_t index) const { return transitions_.at(index); }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<std::string>& place_names() const { return places_; }

  std::optional<std::uint32_t> place_index(std::string_view name) const;
  std::optional<std::uint32_t> label_index(std::string_view name) const;
  std::optional<std::uint32_t> transition_index(std::string_view name) const;

  bool operator==(const Net& other) const = default;

 private:
  std::vector<std::string> places_;
  std::vector<std::string> labels_;
  std::vector<Transition> transitions_;
  std::map<std::string, std::uint32_t, std::less<>> place_ids_;
  std::map<std::string, std::uint32_t, std::less<>> label_ids_;
  std::map<std::string, std::uint32_t, std::less<>> transition_ids_;
};

/// Nonempty multiset of transition occurrences fired concurrently.
struct Step {
  Multiset occurrences;

  bool operator==(const Step& other) const = default;
  auto operator<=>(const Step& other) const = default;
};

bool enabled(const Net& net, const Multiset& marking, std::uint32_t transition);
/// Fires an enabled transition: (m - pre) + post. Raises NotEnabledError.
Multiset fire(const Net& net, const Multiset& marking, std::uint32_t transition);

Multiset step_preset(const Net& net, const Step& step);
Multiset step_postset(const Net& net, const Step& step);
/// The step's label: a multiset over the net's action labels.
Multiset step_label(const Net& net, const Step& step);
bool step_enabled(const Net& net, const Multiset& marking, const Step& step);
Multiset fire_step(const Net& net, const Multiset& marking, const Step& step);

/// All nonempty steps enabled at `marking`, in canonical order. Finite since
/// the cumulative pre-set of a step cannot exceed the marking.
std::vector<Step> enabled_steps(const Net& net, const Multiset& marking);

/// Breadth-first closure under single firings. `markings[0]` is the start;
/// `parent[i]` / `via[i]` replay how markings[i] was first reached
/// (parent < 0 for the start).
struct ReachResult {
  std::vector<Multiset> markings;
  std::vector<std::int64_t> parent;
  std::vector<std::uint32_t> via;
};

/// Returns std::nullopt when more than `max_markings` distinct markings are
/// found (unbounded nets have infinitely many reachable markings).
std::optional<ReachResult> reachable(const Net& net, const Multiset& start,
                                     std::size_t max_markings);

}  // namespace pneq
