#include "pneq/net.hpp"

#include <algorithm>
#include <unordered_map>

#include "pneq/errors.hpp"

namespace pneq {

std::uint32_t Net::add_place(std::string name) {
  if (name.empty()) throw Error("place name must not be empty");
  if (place_ids_.contains(name)) throw Error("duplicate place '" + name + "'");
  auto index = static_cast<std::uint32_t>(places_.size());
  place_ids_.emplace(name, index);
  places_.push_back(std::move(name));
  return index;
}

std::uint32_t Net::add_label(std::string name) {
  if (auto it = label_ids_.find(name); it != label_ids_.end()) return it->second;
  auto index = static_cast<std::uint32_t>(labels_.size());
  label_ids_.emplace(name, index);
  labels_.push_back(std::move(name));
  return index;
}

std::uint32_t Net::add_transition(std::string name, Multiset pre,
                                  std::string_view label, Multiset post) {
  if (pre.empty()) throw Error("transition pre-set must not be empty");
  for (const auto& [place, count] : pre.entries()) {
    if (place >= places_.size()) throw Error("undeclared place in pre-set");
  }
  for (const auto& [place, count] : post.entries()) {
    if (place >= places_.size()) throw Error("undeclared place in post-set");
  }
  if (name.empty()) {
    name = "t" + std::to_string(transitions_.size() + 1);
  }
  if (transition_ids_.contains(name)) {
    throw Error("duplicate transition '" + name + "'");
  }
  auto index = static_cast<std::uint32_t>(transitions_.size());
  transition_ids_.emplace(name, index);
  transitions_.push_back(
      {std::move(name), std::move(pre), add_label(std::string(label)), std::move(post)});
  return index;
}

std::optional<std::uint32_t> Net::place_index(std::string_view name) const {
  auto it = place_ids_.find(name);
  if (it == place_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Net::label_index(std::string_view name) const {
  auto it = label_ids_.find(name);
  if (it == label_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Net::transition_index(std::string_view name) const {
  auto it = transition_ids_.find(name);
  if (it == transition_ids_.end()) return std::nullopt;
  return it->second;
}

bool enabled(const Net& net, const Multiset& marking, std::uint32_t transition) {
  if (transition >= net.transition_count()) throw Error("unknown transition index");
  return net.transition(transition).pre.subset_of(marking);
}

Multiset fire(const Net& net, const Multiset& marking, std::uint32_t transition) {
  if (!enabled(net, marking, transition)) {
    throw NotEnabledError("transition '" + net.transition(transition).name +
                          "' is not enabled");
  }
  const Transition& t = net.transition(transition);
  return marking.minus(t.pre).plus(t.post);
}

Multiset step_preset(const Net& net, const Step& step) {
  Multiset total;
  for (const auto& [t, n] : step.occurrences.entries()) {
    total = total.plus(net.transition(t).pre.scaled(n));
  }
  return total;
}

Multiset step_postset(const Net& net, const Step& step) {
  Multiset total;
  for (const auto& [t, n] : step.occurrences.entries()) {
    total = total.plus(net.transition(t).post.scaled(n));
  }
  return total;
}

Multiset step_label(const Net& net, const Step& step) {
  Multiset label;
  for (const auto& [t, n] : step.occurrences.entries()) {
    label.add(net.transition(t).label, n);
  }
  return label;
}

bool step_enabled(const Net& net, const Multiset& marking, const Step& step) {
  if (step.occurrences.empty()) throw Error("a step must be nonempty");
  return step_preset(net, step).subset_of(marking);
}

Multiset fire_step(const Net& net, const Multiset& marking, const Step& step) {
  if (!step_enabled(net, marking, step)) {
    throw NotEnabledError("step is not enabled");
  }
  return marking.minus(step_preset(net, step)).plus(step_postset(net, step));
}

namespace {
void collect_steps(const Net& net, const Multiset& remaining, std::uint32_t from,
                   Multiset& current, std::vector<Step>& out) {
  if (!current.empty()) out.push_back({current});
  for (std::uint32_t t = from; t < net.transition_count(); ++t) {
    const Multiset& pre = net.transition(t).pre;
    if (!pre.subset_of(remaining)) continue;
    current.add(t);
    collect_steps(net, remaining.minus(pre), t, current, out);
    current.remove(t);
  }
}
}  // namespace

std::vector<Step> enabled_steps(const Net& net, const Multiset& marking) {
  std::vector<Step> steps;
  Multiset current;
  collect_steps(net, marking, 0, current, steps);
  std::sort(steps.begin(), steps.end());
  return steps;
}

std::optional<ReachResult> reachable(const Net& net, const Multiset& start,
                                     std::size_t max_markings) {
  if (max_markings < 1) throw Error("max_markings must be at least 1");
  ReachResult result;
  std::unordered_map<Multiset, std::uint32_t, MultisetHash> seen;
  result.markings.push_back(start);
  result.parent.push_back(-1);
  result.via.push_back(0);
  seen.emplace(start, 0);
  for (std::size_t i = 0; i < result.markings.size(); ++i) {
    for (std::uint32_t t = 0; t < net.transition_count(); ++t) {
      if (!net.transition(t).pre.subset_of(result.markings[i])) continue;
      Multiset next = fire(net, result.markings[i], t);
      if (seen.contains(next)) continue;
      if (result.markings.size() >= max_markings) return std::nullopt;
      seen.emplace(next, static_cast<std::uint32_t>(result.markings.size()));
      result.markings.push_back(std::move(next));
      result.parent.push_back(static_cast<std::int64_t>(i));
      result.via.push_back(t);
    }
  }
  return result;
}

}  // namespace pneq
