#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ssp/ground_ssp.hpp"
#include "gpaplan/ssp/value_table.hpp"

namespace gpaplan {

/// Delete relaxation of the all-outcomes determinization: every outcome of
/// every ground action becomes a deterministic action with the parent's
/// cost and precondition (negative preconditions are dropped).
class RelaxedPlanningGraph {
 public:
  struct DetAction {
    ActionId parent = 0;
    std::vector<FactId> pre;
    std::vector<FactId> add;
    double cost = 1.0;
  };

  explicit RelaxedPlanningGraph(const GroundSsp& ssp)
      : ssp_(&ssp), pre_of_(ssp.num_facts()), add_of_(ssp.num_facts()) {
    for (const auto& a : ssp.actions) {
      if (!a.statically_enabled) continue;
      for (const auto& o : a.outcomes) {
        if (o.probability <= 0.0 || o.add.empty()) continue;
        const auto id = static_cast<std::uint32_t>(actions_.size());
        actions_.push_back(DetAction{a.id, a.pre_pos, o.add, a.cost});
        for (FactId f : a.pre_pos) pre_of_[f].push_back(id);
        for (FactId f : o.add) add_of_[f].push_back(id);
        if (a.pre_pos.empty()) no_pre_.push_back(id);
      }
    }
    fact_cost_.resize(ssp.num_facts());
    fact_level_.resize(ssp.num_facts());
    action_cost_.resize(actions_.size());
    action_level_.resize(actions_.size());
    missing_.resize(actions_.size());
  }

  /// Additive cost of the goal from s; infinite if relaxed-unreachable.
  double h_add(const State& s) {
    if (ssp_->is_goal(s)) return 0.0;
    if (ssp_->goal_unsatisfiable) return kInfinity;
    propagate(s);
    double h = 0.0;
    for (FactId g : ssp_->goal_pos) {
      if (is_infinite(fact_cost_[g])) return kInfinity;
      h += fact_cost_[g];
    }
    return h > 0.0 ? h : 1.0;
  }

  /// Cost of a relaxed plan extracted backwards from the goal. Each subgoal
  /// is supported by an achiever from the earliest layer, preferring the
  /// lowest additive cost and then the lowest id.
  double h_ff(const State& s) {
    if (ssp_->is_goal(s)) return 0.0;
    if (ssp_->goal_unsatisfiable) return kInfinity;
    propagate(s);
    std::vector<FactId> open;
    std::vector<char> achieved(ssp_->num_facts(), 0);
    std::vector<char> used(actions_.size(), 0);
    for (FactId g : ssp_->goal_pos) {
      if (is_infinite(fact_cost_[g])) return kInfinity;
      open.push_back(g);
    }
    // Highest layer first, so supporters' effects can cover lower subgoals.
    auto by_level = [&](FactId a, FactId b) {
      return fact_level_[a] != fact_level_[b] ? fact_level_[a] < fact_level_[b] : a > b;
    };
    std::priority_queue<FactId, std::vector<FactId>, decltype(by_level)> queue(by_level, open);
    double h = 0.0;
    while (!queue.empty()) {
      const FactId f = queue.top();
      queue.pop();
      if (achieved[f] || s.test(f)) continue;
      achieved[f] = 1;
      const std::uint32_t sup = supporter(f);
      if (used[sup]) continue;
      used[sup] = 1;
      h += actions_[sup].cost;
      for (FactId a : actions_[sup].add) achieved[a] = 1;
      for (FactId p : actions_[sup].pre)
        if (!achieved[p] && !s.test(p)) queue.push(p);
    }
    return h > 0.0 ? h : 1.0;
  }

 private:
  std::uint32_t supporter(FactId f) const {
    std::uint32_t best = 0;
    bool found = false;
    for (std::uint32_t a : add_of_[f]) {
      if (missing_[a] != 0 || action_level_[a] + 1 != fact_level_[f]) continue;
      if (!found || action_cost_[a] < action_cost_[best]) {
        best = a;
        found = true;
      }
    }
    return best;
  }

  // Generalized Dijkstra over the relaxed graph, computing additive costs
  // and layer indices (max-combination with unit steps) together.
  void propagate(const State& s) {
    std::fill(fact_cost_.begin(), fact_cost_.end(), kInfinity);
    std::fill(fact_level_.begin(), fact_level_.end(), kUnreached);
    for (std::uint32_t a = 0; a < actions_.size(); ++a) {
      missing_[a] = static_cast<std::uint32_t>(actions_[a].pre.size());
      action_cost_[a] = actions_[a].cost;
      action_level_[a] = 0;
    }
    // Layers: breadth-first fixpoint.
    std::vector<FactId> layer;
    s.for_each_fact([&](FactId f) {
      fact_level_[f] = 0;
      layer.push_back(f);
    });
    std::vector<std::uint32_t> ready = no_pre_;
    std::vector<std::uint32_t> count(actions_.size());
    for (std::uint32_t a = 0; a < actions_.size(); ++a) count[a] = missing_[a];
    for (std::uint32_t level = 0; !layer.empty() || !ready.empty(); ++level) {
      for (FactId f : layer)
        for (std::uint32_t a : pre_of_[f])
          if (--count[a] == 0) ready.push_back(a);
      layer.clear();
      for (std::uint32_t a : ready) {
        action_level_[a] = level;
        for (FactId f : actions_[a].add)
          if (fact_level_[f] == kUnreached) {
            fact_level_[f] = level + 1;
            layer.push_back(f);
          }
      }
      ready.clear();
    }
    using Item = std::pair<double, FactId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    s.for_each_fact([&](FactId f) {
      fact_cost_[f] = 0.0;
      heap.emplace(0.0, f);
    });
    auto fire = [&](std::uint32_t a) {
      for (FactId f : actions_[a].add)
        if (action_cost_[a] < fact_cost_[f]) {
          fact_cost_[f] = action_cost_[a];
          heap.emplace(action_cost_[a], f);
        }
    };
    for (std::uint32_t a : no_pre_) fire(a);
    while (!heap.empty()) {
      auto [c, f] = heap.top();
      heap.pop();
      if (c > fact_cost_[f]) continue;
      for (std::uint32_t a : pre_of_[f]) {
        action_cost_[a] += c;
        if (--missing_[a] == 0) fire(a);
      }
    }
  }

  static constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

  const GroundSsp* ssp_;
  std::vector<DetAction> actions_;
  std::vector<std::vector<std::uint32_t>> pre_of_;
  std::vector<std::vector<std::uint32_t>> add_of_;
  std::vector<std::uint32_t> no_pre_;
  std::vector<double> fact_cost_;
  std::vector<std::uint32_t> fact_level_;
  std::vector<double> action_cost_;
  std::vector<std::uint32_t> action_level_;
  std::vector<std::uint32_t> missing_;
};

inline double h_zero(const GroundSsp&, const State&) { return 0.0; }

inline double h_add(const GroundSsp& ssp, const State& s) { return RelaxedPlanningGraph(ssp).h_add(s); }

inline double h_ff(const GroundSsp& ssp, const State& s) { return RelaxedPlanningGraph(ssp).h_ff(s); }

/// Heuristic by CLI name: "ff", "hadd" or "zero". The returned callable owns
/// its scratch buffers and must not be shared between threads.
inline Heuristic make_heuristic(const GroundSsp& ssp, const std::string& id) {
  if (id == "zero") return [](const State&) { return 0.0; };
  if (id == "ff" || id == "hadd") {
    auto graph = std::make_shared<RelaxedPlanningGraph>(ssp);
    if (id == "ff") return [graph](const State& s) { return graph->h_ff(s); };
    return [graph](const State& s) { return graph->h_add(s); };
  }
  throw Error(ErrorCode::InvalidParam, "unknown heuristic '" + id + "'");
}

}  // namespace gpaplan
