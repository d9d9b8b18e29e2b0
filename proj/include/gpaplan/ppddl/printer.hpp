#pragma once

#include <sstream>
#include <string>

#include "gpaplan/ppddl/ast.hpp"

namespace gpaplan::ppddl {

namespace detail {

inline std::string rational_text(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline void print_typed(std::ostream& os, const std::vector<TypedName>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) os << ' ';
    os << names[i].name << " - " << names[i].type;
  }
}

inline void print_atom(std::ostream& os, const Atom& a) {
  os << '(' << a.predicate;
  for (const auto& arg : a.args) os << ' ' << arg;
  os << ')';
}

inline void print_outcome_body(std::ostream& os, const Outcome& o) {
  os << "(and";
  for (const auto& a : o.add) {
    os << ' ';
    print_atom(os, a);
  }
  for (const auto& a : o.del) {
    os << " (not ";
    print_atom(os, a);
    os << ')';
  }
  os << ')';
}

inline void print_formula(std::ostream& os, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      print_atom(os, f.atom);
      return;
    case Formula::Kind::Equal:
      os << "(= " << f.atom.args[0] << ' ' << f.atom.args[1] << ')';
      return;
    case Formula::Kind::Not:
      os << "(not ";
      print_formula(os, f.children[0]);
      os << ')';
      return;
    case Formula::Kind::And:
      os << "(and";
      for (const auto& c : f.children) {
        os << ' ';
        print_formula(os, c);
      }
      os << ')';
      return;
    case Formula::Kind::Imply:
      os << "(imply ";
      print_formula(os, f.children[0]);
      os << ' ';
      print_formula(os, f.children[1]);
      os << ')';
      return;
    case Formula::Kind::Forall:
      os << "(forall (";
      print_typed(os, f.vars);
      os << ") ";
      print_formula(os, f.children[0]);
      os << ')';
      return;
  }
}

}  // namespace detail

/// Canonical text form; parsing it yields a structurally equal DomainDef.
inline std::string to_text(const DomainDef& d) {
  using namespace detail;
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    for (const auto& t : d.types) os << ' ' << t.name << " - " << t.parent;
    os << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants ";
    print_typed(os, d.constants);
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    if (p.is_type) continue;
    os << " (" << p.name;
    if (!p.params.empty()) os << ' ';
    print_typed(os, p.params);
    os << ')';
  }
  os << ")\n";
  for (const auto& a : d.action_schemas) {
    os << "  (:action " << a.name << "\n    :parameters (";
    print_typed(os, a.params);
    os << ")\n    :precondition (and";
    for (const auto& l : a.precondition.literals) {
      os << ' ';
      if (l.negated) os << "(not ";
      print_atom(os, l.atom);
      if (l.negated) os << ')';
    }
    for (const auto& e : a.precondition.equalities) {
      os << ' ';
      if (e.negated) os << "(not ";
      os << "(= " << e.lhs << ' ' << e.rhs << ')';
      if (e.negated) os << ')';
    }
    os << ")\n    :effect ";
    if (a.effect.outcomes.size() == 1 && a.effect.outcomes[0].probability == Rational(1)) {
      print_outcome_body(os, a.effect.outcomes[0]);
    } else {
      os << "(probabilistic";
      for (const auto& o : a.effect.outcomes) {
        os << ' ' << rational_text(o.probability) << ' ';
        print_outcome_body(os, o);
      }
      os << ')';
    }
    if (a.cost) {
      std::ostringstream c;
      c.precision(17);
      c << *a.cost;
      os << "\n    :cost " << c.str();
    }
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string to_text(const ProblemDef& p) {
  using namespace detail;
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain_name << ")\n  (:objects ";
  print_typed(os, p.objects);
  os << ")\n  (:init";
  for (const auto& a : p.init) {
    os << ' ';
    print_atom(os, a);
  }
  os << ")\n  (:goal ";
  print_formula(os, p.goal);
  os << "))\n";
  return os.str();
}

}  // namespace gpaplan::ppddl
