#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gpaplan/ssp/bellman.hpp"
#include "gpaplan/ssp/rng.hpp"
#include "gpaplan/ssp/state_space.hpp"

namespace gpaplan {

/// Deterministic partial policy, keyed by ground state so it stays valid
/// across StateSpace instances of the same problem.
class Policy {
 public:
  std::optional<ActionId> action(const State& s) const {
    auto it = map_.find(s);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void set(const State& s, ActionId a) { map_[s] = a; }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

  /// Entries sorted by state for reproducible iteration.
  std::vector<std::pair<State, ActionId>> entries() const {
    std::vector<std::pair<State, ActionId>> out(map_.begin(), map_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  bool operator==(const Policy& other) const { return map_ == other.map_; }

 private:
  std::unordered_map<State, ActionId, StateHash> map_;
};

/// Greedy policy over the states reachable from s0 under its own choices.
/// States with infinite value are left unmapped.
inline Policy extract_policy(StateSpace& space, ValueTable& v, StateId s0) {
  Policy pi;
  std::vector<char> seen(space.size(), 0);
  std::vector<StateId> stack{s0};
  auto mark = [&](StateId s) {
    if (s >= seen.size()) seen.resize(std::max<std::size_t>(s + 1, seen.size() * 2), 0);
    if (seen[s]) return false;
    seen[s] = 1;
    return true;
  };
  mark(s0);
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    if (space.is_goal(s) || is_infinite(v.get(s))) continue;
    auto a = greedy_action(space, v, s);
    if (!a) continue;
    pi.set(space.state(s), *a);
    for (const auto& t : find_edge(space, s, *a)->outcomes)
      if (mark(t.dest)) stack.push_back(t.dest);
  }
  return pi;
}

inline Policy extract_policy(StateSpace& space, ValueTable& v) { return extract_policy(space, v, space.initial()); }

/// States reachable from s0 under pi, or nullopt if some reachable non-goal
/// state is unmapped or mapped to an inapplicable action.
inline std::optional<std::vector<StateId>> policy_envelope(StateSpace& space, const Policy& pi, StateId s0) {
  std::vector<StateId> order{s0};
  std::unordered_map<StateId, char> seen{{s0, 1}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const StateId s = order[i];
    if (space.is_goal(s)) continue;
    auto a = pi.action(space.state(s));
    if (!a) return std::nullopt;
    const ActionEdge* e = find_edge(space, s, *a);
    if (!e) return std::nullopt;
    for (const auto& t : e->outcomes)
      if (t.probability > 0.0 && seen.emplace(t.dest, 1).second) order.push_back(t.dest);
  }
  return order;
}

/// True iff pi is defined on every state it reaches from s0 and reaches the
/// goal from each of them with probability 1. When `require_finite_cost` is
/// set, a transition of infinite cost also disqualifies the policy.
inline bool is_partial_proper(StateSpace& space, const Policy& pi, StateId s0, bool require_finite_cost = false) {
  auto env = policy_envelope(space, pi, s0);
  if (!env) return false;
  const auto& states = *env;
  std::unordered_map<StateId, std::size_t> local;
  for (std::size_t i = 0; i < states.size(); ++i) local[states[i]] = i;
  // Reverse pi-edges, then backward search from goal states.
  std::vector<std::vector<std::size_t>> preds(states.size());
  std::vector<char> good(states.size(), 0);
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const StateId s = states[i];
    if (space.is_goal(s)) {
      good[i] = 1;
      frontier.push_back(i);
      continue;
    }
    for (const auto& t : find_edge(space, s, *pi.action(space.state(s)))->outcomes) {
      if (t.probability <= 0.0) continue;
      if (require_finite_cost && is_infinite(t.cost)) return false;
      preds[local.at(t.dest)].push_back(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.back();
    frontier.pop_back();
    for (std::size_t p : preds[i])
      if (!good[p]) {
        good[p] = 1;
        frontier.push_back(p);
      }
  }
  return std::all_of(good.begin(), good.end(), [](char g) { return g != 0; });
}

inline bool is_partial_proper(const GroundSsp& ssp, const Policy& pi) {
  StateSpace space(ssp);
  return is_partial_proper(space, pi, space.initial());
}

/// Expected cost of following pi from s0, by a sparse linear solve over the
/// policy envelope; infinite when pi is not partial proper.
inline double policy_value(StateSpace& space, const Policy& pi, StateId s0) {
  if (!is_partial_proper(space, pi, s0, true)) return kInfinity;
  const auto states = *policy_envelope(space, pi, s0);
  std::unordered_map<StateId, int> row;
  for (StateId s : states)
    if (!space.is_goal(s)) row.emplace(s, static_cast<int>(row.size()));
  if (row.empty()) return 0.0;
  const int n = static_cast<int>(row.size());
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const auto& [s, i] : row) {
    entries.emplace_back(i, i, 1.0);
    for (const auto& t : find_edge(space, s, *pi.action(space.state(s)))->outcomes) {
      rhs[i] += t.probability * t.cost;
      auto it = row.find(t.dest);
      if (it != row.end()) entries.emplace_back(i, it->second, -t.probability);
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) return kInfinity;
  const Eigen::VectorXd x = lu.solve(rhs);
  return x[row.at(s0)];
}

inline double policy_value(const GroundSsp& ssp, const Policy& pi) {
  StateSpace space(ssp);
  return policy_value(space, pi, space.initial());
}

struct EvalStats {
  double mean_cost = 0.0;
  double std_dev = 0.0;
  double goal_rate = 0.0;
  std::vector<double> costs;  // one entry per trial
};

/// Mean and sample standard deviation of a cost log.
inline void summarize(EvalStats& st) {
  const double n = static_cast<double>(st.costs.size());
  if (st.costs.empty()) return;
  double sum = 0.0;
  for (double c : st.costs) sum += c;
  st.mean_cost = sum / n;
  double ss = 0.0;
  for (double c : st.costs) ss += (c - st.mean_cost) * (c - st.mean_cost);
  st.std_dev = st.costs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

/// Monte-Carlo simulation of pi from the initial state. A trial ends at a
/// goal, at the horizon, or at a state pi does not cover; the latter is
/// charged one unit per remaining step.
inline EvalStats evaluate_policy(const GroundSsp& ssp, const Policy& pi, std::size_t trials, std::size_t horizon,
                                 std::uint64_t seed) {
  EvalStats st;
  const CounterRng rng{seed};
  std::size_t reached = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    State s = ssp.initial_state;
    double cost = 0.0;
    bool goal = ssp.is_goal(s);
    for (std::size_t step = 0; step < horizon && !goal; ++step) {
      auto a = pi.action(s);
      if (!a || !ssp.actions[*a].applicable(s)) {
        cost += static_cast<double>(horizon - step);
        break;
      }
      auto succ = successors(ssp, s, ssp.actions[*a]);
      const double u = rng.uniform(trial, step, 0x5eed);
      double acc = 0.0;
      std::size_t pick = succ.size() - 1;
      for (std::size_t k = 0; k < succ.size(); ++k) {
        acc += succ[k].probability;
        if (u < acc) {
          pick = k;
          break;
        }
      }
      cost += succ[pick].cost;
      s = std::move(succ[pick].state);
      goal = ssp.is_goal(s);
    }
    if (goal) ++reached;
    st.costs.push_back(cost);
  }
  summarize(st);
  st.goal_rate = trials ? static_cast<double>(reached) / static_cast<double>(trials) : 0.0;
  return st;
}

}  // namespace gpaplan
