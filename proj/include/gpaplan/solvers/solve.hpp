#pragma once

#include <string>

#include "gpaplan/solvers/lao_star.hpp"
#include "gpaplan/solvers/lrtdp.hpp"
#include "gpaplan/solvers/soft_flares.hpp"
#include "gpaplan/solvers/value_iteration.hpp"

namespace gpaplan {

inline bool is_solver_id(const std::string& id) {
  return id == "vi" || id == "lao" || id == "lrtdp" || id == "soft-flares";
}

/// Runs the solver named by `id` ("vi", "lao", "lrtdp" or "soft-flares") on
/// an existing state space. VI ignores the heuristic.
inline SolveResult solve(const std::string& id, std::shared_ptr<StateSpace> space, Heuristic h, const SolverConfig& cfg) {
  if (id == "vi") return value_iteration(std::move(space), cfg);
  if (id == "lao") return lao_star(std::move(space), std::move(h), cfg);
  if (id == "lrtdp") return lrtdp(std::move(space), std::move(h), cfg);
  if (id == "soft-flares") return soft_flares(std::move(space), std::move(h), cfg);
  throw Error(ErrorCode::InvalidParam, "unknown solver '" + id + "'");
}

inline SolveResult solve(const std::string& id, const GroundSsp& ssp, const SolverConfig& cfg) {
  return solve(id, std::make_shared<StateSpace>(ssp, cfg.state_limit), make_heuristic(ssp, cfg.heuristic), cfg);
}

}  // namespace gpaplan
