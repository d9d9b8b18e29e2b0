#pragma once

#include "gpaplan/solvers/common.hpp"

namespace gpaplan {

namespace detail {

/// Labels the greedy closure of s solved if every state in it is
/// epsilon-consistent; otherwise backs the closure up in reverse order.
inline bool check_solved(StateSpace& space, ValueTable& v, StateId s, double epsilon, SolveStats& stats) {
  bool rv = true;
  std::vector<StateId> open;
  std::vector<StateId> closed;
  std::unordered_map<StateId, char> seen;
  if (!v.solved(s)) {
    open.push_back(s);
    seen[s] = 1;
  }
  while (!open.empty()) {
    const StateId x = open.back();
    open.pop_back();
    closed.push_back(x);
    if (space.is_goal(x)) continue;
    const Backup b = bellman_backup(space, v, x);
    ++stats.backups;
    if (b.residual > epsilon) {
      rv = false;
      continue;
    }
    if (!b.action) continue;
    for (const auto& t : find_edge(space, x, *b.action)->outcomes)
      if (t.probability > 0.0 && !v.solved(t.dest) && seen.emplace(t.dest, 1).second) open.push_back(t.dest);
  }
  if (rv) {
    for (StateId x : closed) v.mark_solved(x);
  } else {
    while (!closed.empty()) {
      bellman_update(space, v, closed.back());
      ++stats.backups;
      closed.pop_back();
    }
  }
  return rv;
}

}  // namespace detail

/// Labeled RTDP. Trials follow greedy actions with outcomes drawn from a
/// counter-based generator keyed by (seed, trial, depth); states whose greedy
/// closure is epsilon-consistent are labeled solved on the way back.
inline SolveResult lrtdp(std::shared_ptr<StateSpace> space, Heuristic h, const SolverConfig& cfg) {
  cfg.validate();
  Deadline clock(cfg.time_limit);
  SolveStats stats;
  auto v = std::make_shared<ValueTable>(*space, std::move(h));
  const CounterRng rng{cfg.seed};
  const StateId s0 = space->initial();
  const std::size_t cap = cfg.trial_depth_cap();
  std::vector<StateId> visited;
  while (!v->solved(s0)) {
    if (stats.trials >= cfg.max_trials) break;
    if (clock.expired()) {
      stats.time_limit_hit = true;
      break;
    }
    const std::uint64_t trial = stats.trials++;
    visited.clear();
    StateId s = s0;
    bool truncated = false;
    for (std::size_t depth = 0; !v->solved(s); ++depth) {
      visited.push_back(s);
      if (space->is_goal(s)) break;
      const Backup b = bellman_update(*space, *v, s);
      ++stats.backups;
      if (!b.action) break;
      if (depth + 1 >= cap || (depth % 4096 == 4095 && clock.expired())) {
        truncated = true;
        break;
      }
      if (trap_probe_depth(depth) && eliminate_dead_ends(*space, *v, s0) > 0) {
        truncated = true;
        break;
      }
      s = sample_outcome(*find_edge(*space, s, *b.action), rng.uniform(trial, depth)).dest;
    }
    if (truncated) {
      eliminate_dead_ends(*space, *v, s0);
      continue;
    }
    while (!visited.empty()) {
      const StateId x = visited.back();
      visited.pop_back();
      if (!detail::check_solved(*space, *v, x, cfg.epsilon, stats)) break;
    }
  }
  stats.converged = v->solved(s0);
  stats.states_expanded = space->size();
  return finish(std::move(space), std::move(v), stats, clock);
}

inline SolveResult lrtdp(const GroundSsp& ssp, const SolverConfig& cfg) {
  return lrtdp(std::make_shared<StateSpace>(ssp, cfg.state_limit), make_heuristic(ssp, cfg.heuristic), cfg);
}

}  // namespace gpaplan
