#pragma once

#include <cmath>

#include "gpaplan/solvers/common.hpp"

namespace gpaplan {

/// Probability of ending a trial at a state whose labeled depth falls d
/// steps short of the horizon t. A logistic curve centred at t/2, scaled so
/// that p(0) = beta - 1e-3 and p(t) = alpha + 1e-3.
inline double soft_label_probability(const SoftFlaresConfig& c, double d) {
  if (c.t_horizon == 0) return 0.0;
  const double t = static_cast<double>(c.t_horizon);
  const double span = c.beta - c.alpha;
  if (span <= 2e-3) return std::clamp(c.beta - span * d / t, c.alpha, c.beta);
  const double q = 1.0 - 1e-3 / span;
  const double k = 2.0 * std::log(q / (1.0 - q));
  const double x = k * (t / 2.0 - d) / t;
  return c.alpha + span / (1.0 + std::exp(-x));
}

namespace detail {

/// Depth-limited check: explores the greedy closure of s up to `horizon`
/// steps. A consistent closure that ends entirely in solved or goal states
/// is labeled solved; a consistent but cut-off closure gives each state a
/// depth label of how far below it the closure was verified.
inline bool check_solved_depth(StateSpace& space, ValueTable& v, std::vector<int>& depth_label, StateId s,
                               std::size_t horizon, double epsilon, SolveStats& stats) {
  if (v.solved(s)) return true;
  bool consistent = true;
  bool complete = true;
  std::vector<std::pair<StateId, std::size_t>> open{{s, 0}};
  std::vector<std::pair<StateId, std::size_t>> closed;
  std::unordered_map<StateId, char> seen{{s, 1}};
  while (!open.empty()) {
    const auto [x, d] = open.back();
    open.pop_back();
    closed.emplace_back(x, d);
    if (space.is_goal(x)) continue;
    const Backup b = bellman_backup(space, v, x);
    ++stats.backups;
    if (b.residual > epsilon) {
      consistent = false;
      continue;
    }
    if (!b.action) continue;
    for (const auto& t : find_edge(space, x, *b.action)->outcomes) {
      if (t.probability <= 0.0 || v.solved(t.dest) || seen.count(t.dest)) continue;
      if (d >= horizon) {
        complete = false;
        continue;
      }
      seen.emplace(t.dest, 1);
      open.emplace_back(t.dest, d + 1);
    }
  }
  if (consistent && complete) {
    for (const auto& c : closed) v.mark_solved(c.first);
    return true;
  }
  if (consistent) {
    for (const auto& [x, d] : closed) {
      if (x >= depth_label.size()) depth_label.resize(std::max<std::size_t>(x + 1, depth_label.size() * 2), -1);
      depth_label[x] = std::max(depth_label[x], static_cast<int>(horizon - d));
    }
    return true;
  }
  while (!closed.empty()) {
    bellman_update(space, v, closed.back().first);
    ++stats.backups;
    closed.pop_back();
  }
  return false;
}

}  // namespace detail

/// Soft-FLARES. Like LRTDP, but labeling is depth-limited to t steps and a
/// trial reaching a depth-labeled state stops there at random, with a
/// probability that grows with the verified depth. The search ends once s0
/// carries a full (unbounded) solved label, so the result is
/// epsilon-consistent as with LRTDP.
inline SolveResult soft_flares(std::shared_ptr<StateSpace> space, Heuristic h, const SolverConfig& cfg) {
  cfg.validate();
  Deadline clock(cfg.time_limit);
  SolveStats stats;
  auto v = std::make_shared<ValueTable>(*space, std::move(h));
  const CounterRng rng{cfg.seed};
  const StateId s0 = space->initial();
  const std::size_t cap = cfg.trial_depth_cap();
  const std::size_t t = cfg.soft_flares.t_horizon;
  std::vector<int> depth_label;
  auto label_of = [&](StateId s) { return s < depth_label.size() ? depth_label[s] : -1; };
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
      const int label = label_of(s);
      if (label >= 0) {
        const double p = soft_label_probability(cfg.soft_flares, static_cast<double>(t) - label);
        if (rng.uniform(trial, depth, 1) < p) break;
      }
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
      if (!detail::check_solved_depth(*space, *v, depth_label, x, t, cfg.epsilon, stats)) break;
    }
  }
  stats.converged = v->solved(s0);
  stats.states_expanded = space->size();
  return finish(std::move(space), std::move(v), stats, clock);
}

inline SolveResult soft_flares(const GroundSsp& ssp, const SolverConfig& cfg) {
  return soft_flares(std::make_shared<StateSpace>(ssp, cfg.state_limit), make_heuristic(ssp, cfg.heuristic), cfg);
}

}  // namespace gpaplan
