#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ssp/ground_ssp.hpp"

namespace gpaplan {

using StateId = std::uint32_t;

struct Successor {
  State state;
  double probability = 0.0;
  double cost = 0.0;
};

/// Actions whose preconditions hold in s, in ascending id order.
inline std::vector<const GroundAction*> applicable_actions(const GroundSsp& ssp, const State& s) {
  std::vector<const GroundAction*> out;
  for (const auto& a : ssp.actions)
    if (a.applicable(s)) out.push_back(&a);
  return out;
}

inline State apply_outcome(const State& s, const GroundOutcome& o) {
  State next = s;
  for (FactId f : o.del) next.reset(f);
  for (FactId f : o.add) next.set(f);
  return next;
}

/// Distinct successor states of applying a in s. Outcomes that produce the
/// same state are merged. Goal states are absorbing: any action yields a
/// cost-0 self-loop.
inline std::vector<Successor> successors(const GroundSsp& ssp, const State& s, const GroundAction& a) {
  if (!a.applicable(s)) throw Error(ErrorCode::NotApplicable, a.name);
  if (ssp.is_goal(s)) return {Successor{s, 1.0, 0.0}};
  std::vector<Successor> out;
  for (const auto& o : a.outcomes) {
    if (o.probability <= 0.0) continue;
    State next = apply_outcome(s, o);
    auto it = std::find_if(out.begin(), out.end(), [&](const Successor& x) { return x.state == next; });
    if (it != out.end()) {
      it->probability += o.probability;
    } else {
      out.push_back(Successor{std::move(next), o.probability, a.cost});
    }
  }
  return out;
}

struct Transition {
  StateId dest = 0;
  double probability = 0.0;
  double cost = 0.0;
};

struct ActionEdge {
  ActionId action = 0;
  std::vector<Transition> outcomes;
};

class StateSpace;

/// Rewrites the cost of a transition at expansion time; used to impose
/// constraints such as a policy automaton.
using CostModifier = std::function<double(const StateSpace&, StateId src, const GroundAction&, StateId dest, double cost)>;

inline constexpr std::size_t kDefaultStateLimit = 4'000'000;

/// Lazily expanded explicit view of a GroundSsp. States are interned to
/// dense ids in discovery order; each state's applicable actions and merged
/// successor distributions are generated once and cached.
class StateSpace {
 public:
  explicit StateSpace(const GroundSsp& ssp, std::size_t state_limit = kDefaultStateLimit, CostModifier modifier = {})
      : ssp_(&ssp), state_limit_(state_limit), modifier_(std::move(modifier)) {
    initial_ = intern(ssp.initial_state);
  }

  StateSpace(const StateSpace&) = delete;
  StateSpace& operator=(const StateSpace&) = delete;

  const GroundSsp& ssp() const { return *ssp_; }
  StateId initial() const { return initial_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t state_limit() const { return state_limit_; }

  StateId intern(const State& s) {
    auto it = index_.find(s);
    if (it != index_.end()) return it->second;
    if (nodes_.size() >= state_limit_)
      throw Error(ErrorCode::StateSpaceLimitExceeded, "more than " + std::to_string(state_limit_) + " states");
    const auto id = static_cast<StateId>(nodes_.size());
    index_.emplace(s, id);
    nodes_.push_back(Node{s, ssp_->is_goal(s), false, {}});
    return id;
  }

  std::optional<StateId> find(const State& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const State& state(StateId id) const { return nodes_[id].state; }
  bool is_goal(StateId id) const { return nodes_[id].goal; }
  bool expanded(StateId id) const { return nodes_[id].expanded; }

  /// Applicable actions with their outcome distributions; empty for goal
  /// states and for states without applicable actions.
  const std::vector<ActionEdge>& edges(StateId id) {
    if (!nodes_[id].expanded) expand(id);
    return nodes_[id].edges;
  }

 private:
  struct Node {
    State state;
    bool goal = false;
    bool expanded = false;
    std::vector<ActionEdge> edges;
  };

  void expand(StateId id) {
    std::vector<ActionEdge> edges;
    if (!nodes_[id].goal) {
      const State src = nodes_[id].state;
      for (const auto& a : ssp_->actions) {
        if (!a.applicable(src)) continue;
        ActionEdge edge{a.id, {}};
        for (auto& succ : successors(*ssp_, src, a)) {
          const StateId dest = intern(succ.state);
          double cost = succ.cost;
          if (modifier_) cost = modifier_(*this, id, a, dest, cost);
          edge.outcomes.push_back(Transition{dest, succ.probability, cost});
        }
        edges.push_back(std::move(edge));
      }
    }
    nodes_[id].edges = std::move(edges);
    nodes_[id].expanded = true;
  }

  const GroundSsp* ssp_;
  std::size_t state_limit_;
  CostModifier modifier_;
  std::deque<Node> nodes_;
  std::unordered_map<State, StateId, StateHash> index_;
  StateId initial_ = 0;
};

}  // namespace gpaplan
