#pragma once

#include "gpaplan/solvers/common.hpp"

namespace gpaplan {

/// Improved LAO*. Each pass walks the best partial solution graph depth
/// first from s0, expands the tip states it meets and backs states up in
/// postorder. The search stops after a pass that expands nothing and whose
/// largest residual is below epsilon.
inline SolveResult lao_star(std::shared_ptr<StateSpace> space, Heuristic h, const SolverConfig& cfg) {
  cfg.validate();
  Deadline clock(cfg.time_limit);
  SolveStats stats;
  auto v = std::make_shared<ValueTable>(*space, std::move(h));
  const StateId s0 = space->initial();
  std::vector<char> expanded;
  std::vector<std::uint32_t> pass_mark;
  auto grow = [&](StateId s) {
    if (s >= expanded.size()) {
      const std::size_t n = std::max<std::size_t>(s + 1, expanded.size() * 2);
      expanded.resize(n, 0);
      pass_mark.resize(n, 0);
    }
  };
  struct Frame {
    StateId state;
    const ActionEdge* edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  std::size_t next_elimination = 64;
  for (std::uint32_t pass = 1;; ++pass) {
    if (clock.expired()) {
      stats.time_limit_hit = true;
      break;
    }
    std::size_t expansions = 0;
    double max_residual = 0.0;
    auto open = [&](StateId s) {
      grow(s);
      pass_mark[s] = pass;
      const ActionEdge* edge = nullptr;
      if (!space->is_goal(s) && !v->solved(s) && expanded[s]) {
        if (auto a = greedy_action(*space, *v, s)) edge = find_edge(*space, s, *a);
      }
      stack.push_back(Frame{s, edge, 0});
    };
    open(s0);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.edge && f.next < f.edge->outcomes.size()) {
        const StateId d = f.edge->outcomes[f.next++].dest;
        grow(d);
        if (pass_mark[d] != pass) open(d);
        continue;
      }
      const StateId s = f.state;
      stack.pop_back();
      if (space->is_goal(s) || v->solved(s)) continue;
      if (!expanded[s]) {
        expanded[s] = 1;
        ++expansions;
        ++stats.states_expanded;
      }
      const Backup b = bellman_update(*space, *v, s);
      ++stats.backups;
      max_residual = std::max(max_residual, b.residual);
    }
    if (expansions == 0 && max_residual < cfg.epsilon) {
      stats.converged = true;
      break;
    }
    if (is_infinite(v->get(s0))) {
      stats.converged = true;
      break;
    }
    if (pass >= next_elimination) {
      next_elimination *= 2;
      eliminate_dead_ends(*space, *v, s0);
    }
  }
  stats.trials = 0;
  return finish(std::move(space), std::move(v), stats, clock);
}

inline SolveResult lao_star(const GroundSsp& ssp, const SolverConfig& cfg) {
  return lao_star(std::make_shared<StateSpace>(ssp, cfg.state_limit), make_heuristic(ssp, cfg.heuristic), cfg);
}

}  // namespace gpaplan
