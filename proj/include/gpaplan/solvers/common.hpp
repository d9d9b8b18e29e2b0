#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/heuristics/relaxed.hpp"
#include "gpaplan/ssp/bellman.hpp"
#include "gpaplan/ssp/policy.hpp"
#include "gpaplan/ssp/rng.hpp"

namespace gpaplan {

struct SoftFlaresConfig {
  std::size_t t_horizon = 4;
  double alpha = 0.1;
  double beta = 0.9;
};

struct SolverConfig {
  double epsilon = 1e-5;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::size_t max_trials = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 0;
  std::string heuristic = "ff";
  std::size_t state_limit = kDefaultStateLimit;
  std::size_t max_trial_depth = 0;  // 0: ten times the 10^4 fallback estimate
  SoftFlaresConfig soft_flares;

  std::size_t trial_depth_cap() const { return max_trial_depth ? max_trial_depth : 10 * 10'000; }

  void validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidParam, "epsilon must be positive");
    const auto& sf = soft_flares;
    if (!(0.0 <= sf.alpha && sf.alpha <= sf.beta && sf.beta <= 1.0))
      throw Error(ErrorCode::InvalidParam, "soft-flares sampler needs 0 <= alpha <= beta <= 1");
  }
};

struct SolveStats {
  std::size_t backups = 0;
  std::size_t states_expanded = 0;
  std::size_t trials = 0;
  double wall_time = 0.0;
  bool converged = false;
  bool time_limit_hit = false;
};

struct SolveResult {
  std::shared_ptr<StateSpace> space;
  std::shared_ptr<ValueTable> values;
  Policy policy;
  double value_s0 = 0.0;
  SolveStats stats;
};

class Deadline {
 public:
  explicit Deadline(double seconds) : start_(Clock::now()), limit_(seconds) {}
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool expired() const { return std::isfinite(limit_) && elapsed() > limit_; }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_;
  double limit_;
};

inline SolveResult finish(std::shared_ptr<StateSpace> space, std::shared_ptr<ValueTable> values, SolveStats stats,
                          const Deadline& clock) {
  SolveResult r;
  r.policy = extract_policy(*space, *values, space->initial());
  r.value_s0 = values->get(space->initial());
  stats.wall_time = clock.elapsed();
  r.space = std::move(space);
  r.values = std::move(values);
  r.stats = stats;
  return r;
}

/// Index of the sampled outcome of an edge for a uniform draw u in [0, 1).
inline const Transition& sample_outcome(const ActionEdge& e, double u) {
  double acc = 0.0;
  for (const auto& t : e.outcomes) {
    acc += t.probability;
    if (u < acc) return t;
  }
  return e.outcomes.back();
}

inline bool finite_cost(const ActionEdge& e) {
  for (const auto& t : e.outcomes)
    if (t.probability > 0.0 && is_infinite(t.cost)) return false;
  return true;
}

/// Almost-sure goal reachability over a closed set of expanded states:
/// the greatest set W such that every state of W reaches a goal with
/// probability 1 using finite-cost actions that never leave W.
/// `states` must contain every successor of every non-goal member.
inline std::vector<char> almost_sure_set(StateSpace& space, const std::vector<StateId>& states,
                                         const std::unordered_map<StateId, std::size_t>& local) {
  const std::size_t n = states.size();
  std::vector<char> in_w(n, 1);
  while (true) {
    std::vector<char> in_y(n, 0);
    for (std::size_t i = 0; i < n; ++i) in_y[i] = in_w[i] && space.is_goal(states[i]);
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_w[i] || in_y[i]) continue;
        for (const auto& e : space.edges(states[i])) {
          if (!finite_cost(e)) continue;
          bool inside = true;
          bool progress = false;
          for (const auto& t : e.outcomes) {
            if (t.probability <= 0.0) continue;
            const std::size_t j = local.at(t.dest);
            inside = inside && in_w[j];
            progress = progress || in_y[j];
          }
          if (inside && progress) {
            in_y[i] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    if (in_y == in_w) return in_w;
    in_w = std::move(in_y);
  }
}

/// Every state reachable from root via finite-cost actions, in BFS order.
inline std::vector<StateId> finite_closure(StateSpace& space, StateId root, std::unordered_map<StateId, std::size_t>& local) {
  std::vector<StateId> states{root};
  local.clear();
  local[root] = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (const auto& e : space.edges(states[i])) {
      if (!finite_cost(e)) continue;
      for (const auto& t : e.outcomes)
        if (t.probability > 0.0 && local.emplace(t.dest, states.size()).second) states.push_back(t.dest);
    }
  }
  return states;
}

/// Labels states reachable from root that cannot reach the goal with
/// probability 1 (dead ends and traps) as infinite and solved. Trial-based
/// solvers call this when trials stop making progress, since value growth
/// inside a trap never ends on its own. Returns the number of states labeled.
inline std::size_t eliminate_dead_ends(StateSpace& space, ValueTable& v, StateId root) {
  std::unordered_map<StateId, std::size_t> local;
  const auto states = finite_closure(space, root, local);
  const auto in_w = almost_sure_set(space, states, local);
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (in_w[i]) continue;
    if (!is_infinite(v.get(states[i])) || !v.solved(states[i])) ++labeled;
    v.set(states[i], kInfinity);
    v.mark_solved(states[i]);
  }
  return labeled;
}

/// Long trials usually mean the greedy policy is circling inside a trap.
/// Trials probe for dead ends at depths 1024, 2048, 4096, ...
inline bool trap_probe_depth(std::size_t depth) {
  const std::size_t n = depth + 1;
  return n >= 1024 && (n & (n - 1)) == 0;
}

}  // namespace gpaplan
