#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace gpaplan::ppddl {

/// Probabilities stay exact until a solver needs floating point.
using Rational = boost::rational<std::int64_t>;

inline constexpr const char* kRootType = "object";

struct TypedName {
  std::string name;
  std::string type = kRootType;

  bool operator==(const TypedName&) const = default;
};

/// Arguments are either variables ("?x") or object/constant names.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  bool operator==(const Atom&) const = default;
};

inline bool is_variable(const std::string& term) { return !term.empty() && term.front() == '?'; }

struct Literal {
  Atom atom;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

struct Equality {
  std::string lhs;
  std::string rhs;
  bool negated = false;

  bool operator==(const Equality&) const = default;
};

/// Conjunction of literals and (in)equalities.
struct Precondition {
  std::vector<Literal> literals;
  std::vector<Equality> equalities;

  bool operator==(const Precondition&) const = default;
};

struct Outcome {
  Rational probability{1};
  std::vector<Atom> add;
  std::vector<Atom> del;

  bool operator==(const Outcome&) const = default;
};

/// Outcome masses sum to exactly 1; a block whose listed masses sum below 1
/// is completed with an explicit empty (no-op) outcome.
struct ProbabilisticEffect {
  std::vector<Outcome> outcomes;

  bool operator==(const ProbabilisticEffect&) const = default;
};

struct PredicateDef {
  std::string name;
  std::vector<TypedName> params;
  bool is_type = false;  // synthesized from :types

  std::size_t arity() const { return params.size(); }
  bool operator==(const PredicateDef&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  Precondition precondition;
  ProbabilisticEffect effect;
  std::optional<double> cost;  // unit cost when absent

  bool operator==(const ActionSchema&) const = default;
};

struct TypeDef {
  std::string name;
  std::string parent = kRootType;

  bool operator==(const TypeDef&) const = default;
};

struct DomainDef {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDef> types;
  std::vector<TypedName> constants;
  std::vector<PredicateDef> predicates;
  std::vector<ActionSchema> action_schemas;

  const PredicateDef* find_predicate(const std::string& pred) const {
    for (const auto& p : predicates)
      if (p.name == pred) return &p;
    return nullptr;
  }
  const TypeDef* find_type(const std::string& type) const {
    for (const auto& t : types)
      if (t.name == type) return &t;
    return nullptr;
  }
  bool has_type(const std::string& type) const { return type == kRootType || find_type(type); }

  /// True when `type` equals `ancestor` or inherits from it.
  bool is_subtype(std::string type, const std::string& ancestor) const {
    if (ancestor == kRootType) return true;
    for (std::size_t guard = 0; guard <= types.size(); ++guard) {
      if (type == ancestor) return true;
      const TypeDef* t = find_type(type);
      if (!t) return false;
      type = t->parent;
    }
    return false;
  }

  bool operator==(const DomainDef&) const = default;
};

/// Goal formulas: atoms, equality, negation, conjunction, implication and
/// universal quantification.
struct Formula {
  enum class Kind { Atom, Equal, Not, And, Imply, Forall };

  Kind kind = Kind::And;
  Atom atom;                      // Atom; Equal uses args[0..1]
  std::vector<TypedName> vars;    // Forall
  std::vector<Formula> children;  // Not: 1, And: n, Imply: 2, Forall: 1

  bool operator==(const Formula&) const = default;
};

struct ProblemDef {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  Formula goal;

  bool operator==(const ProblemDef&) const = default;
};

struct GroundLiteral {
  std::string predicate;
  std::vector<std::string> args;
  bool negated = false;

  bool operator==(const GroundLiteral&) const = default;
  auto operator<=>(const GroundLiteral&) const = default;
};

}  // namespace gpaplan::ppddl
