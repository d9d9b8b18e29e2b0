#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ppddl/ast.hpp"
#include "gpaplan/ssp/ground_ssp.hpp"

namespace gpaplan::ppddl {

struct GroundLimits {
  std::size_t max_facts = std::size_t{1} << 20;
  std::size_t max_actions = std::size_t{1} << 21;
};

namespace detail {

inline void append_unique(std::vector<FactId>& v, FactId f) {
  if (std::find(v.begin(), v.end(), f) == v.end()) v.push_back(f);
}

/// Objects of the problem in grounding order: domain constants, then the
/// problem's objects.
inline std::vector<TypedName> all_objects(const DomainDef& dom, const ProblemDef& prob) {
  std::vector<TypedName> out = dom.constants;
  out.insert(out.end(), prob.objects.begin(), prob.objects.end());
  return out;
}

inline std::set<std::string> static_predicates(const DomainDef& dom) {
  std::set<std::string> fluent;
  for (const auto& a : dom.action_schemas)
    for (const auto& o : a.effect.outcomes) {
      for (const auto& x : o.add) fluent.insert(x.predicate);
      for (const auto& x : o.del) fluent.insert(x.predicate);
    }
  std::set<std::string> out;
  for (const auto& p : dom.predicates)
    if (!fluent.count(p.name)) out.insert(p.name);
  return out;
}

/// Simplified negation-normal-form goal node.
struct GoalNode {
  enum class Kind { True, False, Lit, And, Or };
  Kind kind = Kind::True;
  GroundLiteral lit;
  std::vector<GoalNode> children;
};

inline GoalNode make_const(bool v) { return GoalNode{v ? GoalNode::Kind::True : GoalNode::Kind::False, {}, {}}; }

inline GoalNode make_junction(GoalNode::Kind kind, std::vector<GoalNode> parts) {
  const bool is_and = kind == GoalNode::Kind::And;
  const auto absorbing = is_and ? GoalNode::Kind::False : GoalNode::Kind::True;
  const auto neutral = is_and ? GoalNode::Kind::True : GoalNode::Kind::False;
  GoalNode out{kind, {}, {}};
  for (auto& p : parts) {
    if (p.kind == absorbing) return make_const(!is_and);
    if (p.kind == neutral) continue;
    if (p.kind == kind) {
      for (auto& c : p.children) out.children.push_back(std::move(c));
    } else {
      out.children.push_back(std::move(p));
    }
  }
  if (out.children.empty()) return make_const(is_and);
  if (out.children.size() == 1) return std::move(out.children.front());
  return out;
}

class GoalExpander {
 public:
  GoalExpander(const DomainDef& dom, const ProblemDef& prob)
      : dom_(dom), objects_(all_objects(dom, prob)), static_(static_predicates(dom)) {
    for (const auto& a : prob.init) static_init_.insert(key(a.predicate, a.args));
    for (const auto& o : objects_) {
      std::string t = o.type;
      for (std::size_t guard = 0; guard <= dom.types.size() && t != kRootType; ++guard) {
        static_init_.insert(key(t, {o.name}));
        const TypeDef* td = dom.find_type(t);
        if (!td) break;
        t = td->parent;
      }
    }
  }

  GoalNode expand(const Formula& f, std::map<std::string, std::string>& env, bool positive) const {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Atom: {
        GroundLiteral lit{f.atom.predicate, substitute(f.atom.args, env), !positive};
        if (static_.count(lit.predicate)) return make_const(static_init_.count(key(lit.predicate, lit.args)) == positive);
        return GoalNode{GoalNode::Kind::Lit, std::move(lit), {}};
      }
      case K::Equal: {
        auto args = substitute(f.atom.args, env);
        return make_const((args[0] == args[1]) == positive);
      }
      case K::Not:
        return expand(f.children[0], env, !positive);
      case K::And: {
        std::vector<GoalNode> parts;
        for (const auto& c : f.children) parts.push_back(expand(c, env, positive));
        return make_junction(positive ? GoalNode::Kind::And : GoalNode::Kind::Or, std::move(parts));
      }
      case K::Imply: {
        std::vector<GoalNode> parts;
        parts.push_back(expand(f.children[0], env, !positive));
        parts.push_back(expand(f.children[1], env, positive));
        return make_junction(positive ? GoalNode::Kind::Or : GoalNode::Kind::And, std::move(parts));
      }
      case K::Forall: {
        std::vector<GoalNode> parts;
        bind(f, 0, env, positive, parts);
        return make_junction(positive ? GoalNode::Kind::And : GoalNode::Kind::Or, std::move(parts));
      }
    }
    return make_const(true);
  }

 private:
  const DomainDef& dom_;
  std::vector<TypedName> objects_;
  std::set<std::string> static_;
  std::set<std::string> static_init_;

  static std::string key(const std::string& pred, const std::vector<std::string>& args) {
    std::string k = pred;
    for (const auto& a : args) k += ' ' + a;
    return k;
  }

  static std::vector<std::string> substitute(const std::vector<std::string>& args,
                                             const std::map<std::string, std::string>& env) {
    std::vector<std::string> out;
    for (const auto& a : args) {
      auto it = env.find(a);
      out.push_back(it == env.end() ? a : it->second);
    }
    return out;
  }

  void bind(const Formula& f, std::size_t i, std::map<std::string, std::string>& env, bool positive,
            std::vector<GoalNode>& parts) const {
    if (i == f.vars.size()) {
      parts.push_back(expand(f.children[0], env, positive));
      return;
    }
    const auto saved = env.find(f.vars[i].name) == env.end() ? std::nullopt
                                                             : std::optional<std::string>(env[f.vars[i].name]);
    for (const auto& o : objects_) {
      if (!dom_.is_subtype(o.type, f.vars[i].type)) continue;
      env[f.vars[i].name] = o.name;
      bind(f, i + 1, env, positive, parts);
    }
    if (saved) {
      env[f.vars[i].name] = *saved;
    } else {
      env.erase(f.vars[i].name);
    }
  }
};

}  // namespace detail

/// Expands quantifiers over the problem's objects and folds static
/// predicates (types included) into constants. Returns the goal as a
/// conjunction of ground literals, or nullopt if it is statically false.
inline std::optional<std::vector<GroundLiteral>> expand_goal(const DomainDef& dom, const ProblemDef& prob) {
  detail::GoalExpander ex(dom, prob);
  std::map<std::string, std::string> env;
  detail::GoalNode root = ex.expand(prob.goal, env, true);
  using K = detail::GoalNode::Kind;
  std::vector<GroundLiteral> out;
  if (root.kind == K::False) return std::nullopt;
  if (root.kind == K::True) return out;
  if (root.kind == K::Lit) return std::vector<GroundLiteral>{root.lit};
  if (root.kind == K::And) {
    for (const auto& c : root.children) {
      if (c.kind != K::Lit)
        throw Error(ErrorCode::UnsupportedConstruct, "goal does not reduce to a conjunction of literals");
      if (std::find(out.begin(), out.end(), c.lit) == out.end()) out.push_back(c.lit);
    }
    return out;
  }
  throw Error(ErrorCode::UnsupportedConstruct, "goal does not reduce to a conjunction of literals");
}

/// Instantiates every action schema and predicate over all type-consistent
/// object tuples. No reachability pruning is performed; actions whose
/// (in)equality constraints can never hold are kept but flagged disabled.
inline GroundSsp ground(const DomainDef& dom, const ProblemDef& prob, const GroundLimits& limits = {}) {
  if (prob.domain_name != dom.name)
    throw Error(ErrorCode::DomainMismatch, "problem is for domain '" + prob.domain_name + "'");
  GroundSsp g;
  g.domain = std::make_shared<const DomainDef>(dom);
  g.problem = std::make_shared<const ProblemDef>(prob);

  const auto objects = detail::all_objects(dom, prob);
  std::map<std::string, ObjectId> object_id;
  for (const auto& o : objects) {
    object_id[o.name] = static_cast<ObjectId>(g.object_names.size());
    g.object_names.push_back(o.name);
    g.object_types.push_back(o.type);
  }
  auto candidates = [&](const std::string& type) {
    std::vector<ObjectId> out;
    for (ObjectId i = 0; i < objects.size(); ++i)
      if (dom.is_subtype(objects[i].type, type)) out.push_back(i);
    return out;
  };

  // Odometer over candidate lists in lexicographic order.
  auto for_each_tuple = [](const std::vector<std::vector<ObjectId>>& lists, auto&& visit) {
    for (const auto& l : lists)
      if (l.empty()) return;
    std::vector<std::size_t> idx(lists.size(), 0);
    std::vector<ObjectId> tuple(lists.size());
    while (true) {
      for (std::size_t k = 0; k < lists.size(); ++k) tuple[k] = lists[k][idx[k]];
      visit(tuple);
      std::size_t k = lists.size();
      while (k > 0) {
        --k;
        if (++idx[k] < lists[k].size()) break;
        idx[k] = 0;
        if (k == 0) return;
      }
      if (lists.empty()) return;
    }
  };

  for (PredicateId p = 0; p < dom.predicates.size(); ++p) {
    const auto& pred = dom.predicates[p];
    if (pred.arity() == 0) g.has_phantom = true;
    std::vector<std::vector<ObjectId>> lists;
    for (const auto& param : pred.params) lists.push_back(candidates(param.type));
    for_each_tuple(lists, [&](const std::vector<ObjectId>& tuple) {
      if (g.facts.size() >= limits.max_facts)
        throw Error(ErrorCode::GroundingLimitExceeded, "more than " + std::to_string(limits.max_facts) + " facts");
      std::vector<std::uint32_t> key{p};
      key.insert(key.end(), tuple.begin(), tuple.end());
      g.fact_index_.emplace(std::move(key), static_cast<FactId>(g.facts.size()));
      g.facts.push_back(GroundFact{p, tuple});
    });
  }
  std::map<std::string, PredicateId> pred_id;
  for (PredicateId p = 0; p < dom.predicates.size(); ++p) pred_id[dom.predicates[p].name] = p;

  auto lookup = [&](const Atom& a, const std::map<std::string, ObjectId>& binding) -> FactId {
    std::vector<ObjectId> args;
    for (const auto& t : a.args) {
      auto it = binding.find(t);
      if (it != binding.end()) {
        args.push_back(it->second);
        continue;
      }
      auto ot = object_id.find(t);
      if (ot == object_id.end()) throw Error(ErrorCode::UnknownObject, "'" + t + "'");
      args.push_back(ot->second);
    }
    return g.find_fact(pred_id.at(a.predicate), args);
  };

  g.initial_state = State(g.facts.size());
  const std::map<std::string, ObjectId> no_binding;
  for (const auto& a : prob.init) {
    const FactId f = lookup(a, no_binding);
    if (f == GroundSsp::npos) throw Error(ErrorCode::UnknownType, "init atom (" + a.predicate + " ...) is not type-consistent");
    g.initial_state.set(f);
  }
  for (ObjectId o = 0; o < objects.size(); ++o) {
    std::string t = objects[o].type;
    for (std::size_t guard = 0; guard <= dom.types.size() && t != kRootType; ++guard) {
      g.initial_state.set(g.find_fact(pred_id.at(t), {o}));
      t = dom.find_type(t)->parent;
    }
  }

  for (std::uint32_t si = 0; si < dom.action_schemas.size(); ++si) {
    const auto& schema = dom.action_schemas[si];
    std::vector<std::vector<ObjectId>> lists;
    for (const auto& param : schema.params) lists.push_back(candidates(param.type));
    auto emit = [&](const std::vector<ObjectId>& tuple) {
      if (g.actions.size() >= limits.max_actions)
        throw Error(ErrorCode::GroundingLimitExceeded, "more than " + std::to_string(limits.max_actions) + " actions");
      std::map<std::string, ObjectId> binding;
      for (std::size_t k = 0; k < tuple.size(); ++k) binding[schema.params[k].name] = tuple[k];
      GroundAction ga;
      ga.id = static_cast<ActionId>(g.actions.size());
      ga.schema = si;
      ga.args = tuple;
      ga.cost = schema.cost.value_or(1.0);
      ga.name = schema.name + "(";
      for (std::size_t k = 0; k < tuple.size(); ++k) ga.name += (k ? "," : "") + g.object_names[tuple[k]];
      ga.name += ")";
      auto resolve = [&](const std::string& t) {
        auto it = binding.find(t);
        return it != binding.end() ? it->second : object_id.at(t);
      };
      for (const auto& eq : schema.precondition.equalities)
        if ((resolve(eq.lhs) == resolve(eq.rhs)) == eq.negated) ga.statically_enabled = false;
      for (const auto& lit : schema.precondition.literals) {
        const FactId f = lookup(lit.atom, binding);
        if (f == GroundSsp::npos) {
          if (!lit.negated) ga.statically_enabled = false;
          continue;
        }
        detail::append_unique(lit.negated ? ga.pre_neg : ga.pre_pos, f);
      }
      for (const auto& o : schema.effect.outcomes) {
        GroundOutcome go;
        go.exact_probability = o.probability;
        go.probability = boost::rational_cast<double>(o.probability);
        for (const auto& a : o.add) {
          const FactId f = lookup(a, binding);
          if (f == GroundSsp::npos) {
            if (ga.statically_enabled)
              throw Error(ErrorCode::UnknownType, "effect of " + ga.name + " adds a type-inconsistent atom");
            continue;
          }
          detail::append_unique(go.add, f);
        }
        for (const auto& a : o.del) {
          const FactId f = lookup(a, binding);
          if (f == GroundSsp::npos) continue;
          if (std::find(go.add.begin(), go.add.end(), f) == go.add.end()) detail::append_unique(go.del, f);
        }
        ga.outcomes.push_back(std::move(go));
      }
      g.action_index_[ga.name] = ga.id;
      g.actions.push_back(std::move(ga));
    };
    if (lists.empty()) {
      emit({});
    } else {
      for_each_tuple(lists, emit);
    }
  }

  auto goal = expand_goal(dom, prob);
  if (!goal) {
    g.goal_unsatisfiable = true;
  } else {
    for (const auto& lit : *goal) {
      std::vector<ObjectId> args;
      for (const auto& a : lit.args) args.push_back(object_id.at(a));
      const FactId f = g.find_fact(pred_id.at(lit.predicate), args);
      if (f == GroundSsp::npos) {
        if (!lit.negated) g.goal_unsatisfiable = true;
        continue;
      }
      detail::append_unique(lit.negated ? g.goal_neg : g.goal_pos, f);
    }
  }
  return g;
}

}  // namespace gpaplan::ppddl
