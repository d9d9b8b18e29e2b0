#pragma once

#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpaplan/gpa/gpa.hpp"
#include "gpaplan/solvers/solve.hpp"

namespace gpaplan::gpa {

/// Transition costs of the GPA-constrained problem, evaluated lazily as the
/// state space is expanded: the base cost when the abstract transition has
/// a matching hyperedge, infinity otherwise. Abstract states are memoized
/// per StateId.
class GpaConstraint {
 public:
  GpaConstraint(std::shared_ptr<const Gpa> gpa, const GroundSsp& ssp) : gpa_(std::move(gpa)), abs_(gpa_->vocabulary(), ssp) {}

  double operator()(const StateSpace& space, StateId src, const GroundAction& a, StateId dest, double cost) {
    if (cost == 0.0 && space.is_goal(src)) return cost;
    const VertexId s = vertex(space, src);
    const VertexId d = vertex(space, dest);
    if (s == kNone || d == kNone) return kInfinity;
    if (src != roles_state_) {
      roles_ = abs_.roles(space.state(src));
      roles_state_ = src;
    }
    return gpa_->is_consistent(s, abs_.beta(roles_, a), d) ? cost : kInfinity;
  }

 private:
  static constexpr VertexId kNone = std::numeric_limits<VertexId>::max();
  static constexpr VertexId kUnknown = kNone - 1;

  VertexId vertex(const StateSpace& space, StateId s) {
    if (s >= alpha_.size()) alpha_.resize(std::max<std::size_t>(s + 1, alpha_.size() * 2), kUnknown);
    if (alpha_[s] == kUnknown) {
      auto v = gpa_->find_vertex(abs_.alpha(space.state(s)));
      alpha_[s] = v ? *v : kNone;
    }
    return alpha_[s];
  }

  std::shared_ptr<const Gpa> gpa_;
  abstraction::Abstractor abs_;
  std::vector<VertexId> alpha_;
  std::vector<abstraction::Role> roles_;
  StateId roles_state_ = std::numeric_limits<StateId>::max();
};

/// Cost modifier turning a StateSpace over ssp into the GPA-constrained
/// problem. The gpa must outlive the space only through the shared pointer.
inline CostModifier constrain(const GroundSsp& ssp, std::shared_ptr<const Gpa> gpa) {
  auto c = std::make_shared<GpaConstraint>(std::move(gpa), ssp);
  return [c](const StateSpace& space, StateId src, const GroundAction& a, StateId dest, double cost) {
    return (*c)(space, src, a, dest, cost);
  };
}

inline std::shared_ptr<StateSpace> constrained_space(const GroundSsp& ssp, std::shared_ptr<const Gpa> gpa,
                                                     std::size_t state_limit = kDefaultStateLimit) {
  return std::make_shared<StateSpace>(ssp, state_limit, constrain(ssp, std::move(gpa)));
}

struct AccelResult {
  SolveResult result;       // the returned policy and its value table
  SolveResult constrained;  // phase-one solve of the constrained problem
  bool used_fallback = false;
  bool constrained_proper = false;  // policy check on the constrained solution
  bool constrained_finite = false;  // V(s0) < infinity on the constrained problem
  SolveStats total;                 // both phases combined
};

/// GPA acceleration. Solves the constrained problem; if its policy is
/// partial proper it is returned. Otherwise the unconstrained problem is
/// solved with the constrained values as initial estimates. Only finite
/// values are carried over; solved and dead-end labels are not.
inline AccelResult solve_with_gpa(const GroundSsp& ssp, std::shared_ptr<const Gpa> gpa, const std::string& solver_id,
                                  const SolverConfig& cfg, const std::string& fallback_id = "") {
  AccelResult out;
  Heuristic h = make_heuristic(ssp, cfg.heuristic);
  out.constrained = solve(solver_id, constrained_space(ssp, gpa, cfg.state_limit), h, cfg);
  auto& c = out.constrained;
  out.constrained_finite = !is_infinite(c.value_s0);
  out.constrained_proper = is_partial_proper(*c.space, c.policy, c.space->initial(), true);
  out.total = c.stats;
  if (out.constrained_proper) {
    out.result = c;
    return out;
  }
  auto boot = std::make_shared<std::unordered_map<State, double, StateHash>>();
  for (StateId s = 0; s < c.space->size(); ++s) {
    if (!c.values->initialized(s)) continue;
    const double v = c.values->at(s);
    if (!is_infinite(v)) boot->emplace(c.space->state(s), v);
  }
  Heuristic seeded = [boot, h](const State& s) {
    auto it = boot->find(s);
    return it != boot->end() ? it->second : h(s);
  };
  out.used_fallback = true;
  SolverConfig rest = cfg;
  rest.time_limit = std::max(0.0, cfg.time_limit - c.stats.wall_time);
  out.result = solve(fallback_id.empty() ? solver_id : fallback_id, std::make_shared<StateSpace>(ssp, cfg.state_limit),
                     seeded, rest);
  out.total.backups += out.result.stats.backups;
  out.total.states_expanded += out.result.stats.states_expanded;
  out.total.trials += out.result.stats.trials;
  out.total.wall_time += out.result.stats.wall_time;
  out.total.converged = out.result.stats.converged;
  out.total.time_limit_hit = out.total.time_limit_hit || out.result.stats.time_limit_hit;
  return out;
}

}  // namespace gpaplan::gpa
