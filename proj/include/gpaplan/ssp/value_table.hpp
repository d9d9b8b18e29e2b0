#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ssp/state_space.hpp"

namespace gpaplan {

using Heuristic = std::function<double(const State&)>;

/// Value estimates indexed by StateId of one StateSpace. Unvisited states
/// are initialized on first read from the heuristic; goal states read 0.
class ValueTable {
 public:
  explicit ValueTable(const StateSpace& space, Heuristic heuristic = {})
      : space_(&space), heuristic_(std::move(heuristic)) {}

  bool initialized(StateId s) const { return s < init_.size() && init_[s]; }

  double get(StateId s) {
    if (!initialized(s)) {
      double v = 0.0;
      if (!space_->is_goal(s)) {
        if (!heuristic_) throw Error(ErrorCode::UndefinedValue, "state " + std::to_string(s) + " has no value");
        v = std::max(0.0, heuristic_(space_->state(s)));
      }
      set(s, v);
    }
    return values_[s];
  }

  /// Value without lazy initialization; throws for unset states.
  double at(StateId s) const {
    if (!initialized(s)) throw Error(ErrorCode::UndefinedValue, "state " + std::to_string(s) + " has no value");
    return values_[s];
  }

  void set(StateId s, double v) {
    grow(s);
    values_[s] = space_->is_goal(s) ? 0.0 : std::max(0.0, v);
    init_[s] = 1;
  }

  bool solved(StateId s) const { return s < solved_.size() && solved_[s]; }
  void mark_solved(StateId s) {
    grow(s);
    solved_[s] = 1;
  }
  void clear_solved() { std::fill(solved_.begin(), solved_.end(), 0); }

  const StateSpace& space() const { return *space_; }
  bool has_heuristic() const { return static_cast<bool>(heuristic_); }

 private:
  void grow(StateId s) {
    if (s >= values_.size()) {
      const std::size_t n = std::max<std::size_t>(s + 1, values_.size() * 2);
      values_.resize(n, 0.0);
      init_.resize(n, 0);
      solved_.resize(n, 0);
    }
  }

  const StateSpace* space_;
  Heuristic heuristic_;
  std::vector<double> values_;
  std::vector<char> init_;
  std::vector<char> solved_;
};

/// |a - b| with inf - inf treated as 0.
inline double value_residual(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b);
}

}  // namespace gpaplan
