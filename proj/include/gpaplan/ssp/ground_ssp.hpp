#pragma once

#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpaplan/ppddl/ast.hpp"
#include "gpaplan/ssp/state.hpp"

namespace gpaplan {

/// Saturating "infinite" cost/value. IEEE infinity already gives
/// x + inf = inf and min(x, inf) = x.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool is_infinite(double v) { return v == kInfinity; }

struct GroundFact {
  PredicateId predicate = 0;
  std::vector<ObjectId> args;
};

struct GroundOutcome {
  ppddl::Rational exact_probability{1};
  double probability = 1.0;
  std::vector<FactId> add;
  std::vector<FactId> del;
};

struct GroundAction {
  ActionId id = 0;
  std::uint32_t schema = 0;
  std::vector<ObjectId> args;
  std::vector<FactId> pre_pos;
  std::vector<FactId> pre_neg;
  // False when an (in)equality or a type-inconsistent positive literal makes
  // the precondition unsatisfiable in every state.
  bool statically_enabled = true;
  std::vector<GroundOutcome> outcomes;
  double cost = 1.0;
  std::string name;  // "schema(arg1,arg2)"

  bool applicable(const State& s) const {
    if (!statically_enabled) return false;
    for (FactId f : pre_pos)
      if (!s.test(f)) return false;
    for (FactId f : pre_neg)
      if (s.test(f)) return false;
    return true;
  }
};

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b9u + (h << 6) + (h >> 2);
    return h;
  }
};

/// A grounded SSP. Facts and actions are interned to dense ids whose
/// assignment depends only on the domain and problem text. Immutable after
/// grounding and safe to share between concurrent solver runs.
class GroundSsp {
 public:
  std::shared_ptr<const ppddl::DomainDef> domain;
  std::shared_ptr<const ppddl::ProblemDef> problem;

  std::vector<std::string> object_names;  // domain constants first
  std::vector<std::string> object_types;
  bool has_phantom = false;  // domain declares 0-ary predicates

  std::vector<GroundFact> facts;
  std::vector<GroundAction> actions;
  State initial_state;
  std::vector<FactId> goal_pos;
  std::vector<FactId> goal_neg;
  bool goal_unsatisfiable = false;

  const std::string& id() const { return problem->name; }
  std::size_t num_facts() const { return facts.size(); }
  std::size_t num_objects() const { return object_names.size(); }

  bool is_goal(const State& s) const {
    if (goal_unsatisfiable) return false;
    for (FactId f : goal_pos)
      if (!s.test(f)) return false;
    for (FactId f : goal_neg)
      if (s.test(f)) return false;
    return true;
  }

  std::string fact_name(FactId f) const {
    const auto& fact = facts[f];
    std::string out = "(" + domain->predicates[fact.predicate].name;
    for (auto o : fact.args) out += " " + object_names[o];
    return out + ")";
  }

  /// Looks up a fact by predicate and argument ids; returns npos if the
  /// tuple is not type-consistent.
  static constexpr FactId npos = std::numeric_limits<FactId>::max();
  FactId find_fact(PredicateId pred, const std::vector<ObjectId>& args) const {
    std::vector<std::uint32_t> key{pred};
    key.insert(key.end(), args.begin(), args.end());
    auto it = fact_index_.find(key);
    return it == fact_index_.end() ? npos : it->second;
  }

  ActionId find_action(const std::string& name) const {
    auto it = action_index_.find(name);
    return it == action_index_.end() ? npos : it->second;
  }

  std::unordered_map<std::vector<std::uint32_t>, FactId, VecHash> fact_index_;
  std::unordered_map<std::string, ActionId> action_index_;
};

}  // namespace gpaplan
