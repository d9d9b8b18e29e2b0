#pragma once

#include "gpaplan/solvers/common.hpp"

namespace gpaplan {

/// Synchronous value iteration over the full reachable state space; the
/// reference oracle for the heuristic-search solvers. States outside the
/// almost-sure goal region are fixed at infinity, the rest start at 0 and
/// are swept with Jacobi updates until the largest change is below epsilon.
inline SolveResult value_iteration(std::shared_ptr<StateSpace> space, const SolverConfig& cfg) {
  cfg.validate();
  Deadline clock(cfg.time_limit);
  SolveStats stats;
  auto v = std::make_shared<ValueTable>(*space);
  std::unordered_map<StateId, std::size_t> local;
  std::vector<StateId> states{space->initial()};
  local[space->initial()] = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (const auto& e : space->edges(states[i]))
      for (const auto& t : e.outcomes)
        if (t.probability > 0.0 && local.emplace(t.dest, states.size()).second) states.push_back(t.dest);
  }
  stats.states_expanded = states.size();
  const std::size_t n = states.size();
  const auto in_w = almost_sure_set(*space, states, local);

  // Edges usable inside W, flattened to local indices.
  struct Out {
    std::size_t dest;
    double p;
    double c;
  };
  std::vector<std::vector<std::vector<Out>>> usable(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_w[i] || space->is_goal(states[i])) continue;
    for (const auto& e : space->edges(states[i])) {
      if (!finite_cost(e)) continue;
      std::vector<Out> outs;
      bool inside = true;
      for (const auto& t : e.outcomes) {
        if (t.probability <= 0.0) continue;
        const std::size_t j = local.at(t.dest);
        inside = inside && in_w[j];
        outs.push_back(Out{j, t.probability, t.cost});
      }
      if (inside) usable[i].push_back(std::move(outs));
    }
  }

  std::vector<double> cur(n, 0.0), next(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!in_w[i]) cur[i] = next[i] = kInfinity;
  while (true) {
    double max_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_w[i] || usable[i].empty()) continue;
      double best = kInfinity;
      for (const auto& outs : usable[i]) {
        double q = 0.0;
        for (const auto& o : outs) q += o.p * (o.c + cur[o.dest]);
        best = std::min(best, q);
      }
      next[i] = best;
      max_residual = std::max(max_residual, std::abs(best - cur[i]));
      ++stats.backups;
    }
    cur.swap(next);
    if (max_residual < cfg.epsilon) {
      stats.converged = true;
      break;
    }
    if (clock.expired()) {
      stats.time_limit_hit = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    v->set(states[i], cur[i]);
    v->mark_solved(states[i]);
  }
  return finish(std::move(space), std::move(v), stats, clock);
}

inline SolveResult value_iteration(const GroundSsp& ssp, const SolverConfig& cfg) {
  return value_iteration(std::make_shared<StateSpace>(ssp, cfg.state_limit), cfg);
}

}  // namespace gpaplan
