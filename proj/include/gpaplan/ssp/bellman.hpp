#pragma once

#include <optional>

#include "gpaplan/ssp/state_space.hpp"
#include "gpaplan/ssp/value_table.hpp"

namespace gpaplan {

struct Backup {
  double value = 0.0;
  std::optional<ActionId> action;
  double residual = 0.0;
};

/// Expected cost of taking an edge under V; infinite if any positive-mass
/// outcome has infinite cost or value.
inline double q_value(const ActionEdge& edge, ValueTable& v) {
  double q = 0.0;
  for (const auto& t : edge.outcomes) {
    if (t.probability <= 0.0) continue;
    const double next = v.get(t.dest);
    if (is_infinite(t.cost) || is_infinite(next)) return kInfinity;
    q += t.probability * (t.cost + next);
  }
  return q;
}

/// Greedy action under V with ties broken by lowest action id; nullopt for
/// goal states and when every action has infinite Q-value.
inline std::optional<ActionId> greedy_action(StateSpace& space, ValueTable& v, StateId s, double* best_q = nullptr) {
  std::optional<ActionId> best;
  double best_value = kInfinity;
  if (!space.is_goal(s)) {
    for (const auto& e : space.edges(s)) {
      const double q = q_value(e, v);
      if (q < best_value) {
        best_value = q;
        best = e.action;
      }
    }
  } else {
    best_value = 0.0;
  }
  if (best_q) *best_q = best_value;
  return best;
}

/// One application of the Bellman optimality operator at s. V is not
/// modified; use bellman_update to store the result.
inline Backup bellman_backup(StateSpace& space, ValueTable& v, StateId s) {
  Backup b;
  const double old = v.get(s);
  if (space.is_goal(s)) return b;
  b.action = greedy_action(space, v, s, &b.value);
  b.residual = value_residual(b.value, old);
  return b;
}

inline Backup bellman_update(StateSpace& space, ValueTable& v, StateId s) {
  Backup b = bellman_backup(space, v, s);
  v.set(s, b.value);
  return b;
}

inline const ActionEdge* find_edge(StateSpace& space, StateId s, ActionId a) {
  for (const auto& e : space.edges(s))
    if (e.action == a) return &e;
  return nullptr;
}

}  // namespace gpaplan
