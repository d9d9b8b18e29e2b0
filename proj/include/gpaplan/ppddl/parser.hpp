#pragma once

#include <algorithm>
#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ppddl/ast.hpp"
#include "gpaplan/ppddl/sexpr.hpp"

namespace gpaplan::ppddl {

namespace detail {

[[noreturn]] inline void syntax_error(const SExpr& at, const std::string& what) {
  throw Error(ErrorCode::Syntax, what + " at " + where(at.pos));
}

[[noreturn]] inline void unsupported(const SExpr& at, const std::string& construct) {
  throw Error(ErrorCode::UnsupportedConstruct, construct + " at " + where(at.pos));
}

inline const std::string& expect_atom(const SExpr& e, const char* what) {
  if (!e.is_atom() || e.atom.empty()) syntax_error(e, std::string("expected ") + what);
  return e.atom;
}

inline void expect_list(const SExpr& e, const char* what) {
  if (!e.is_list) syntax_error(e, std::string("expected ") + what);
}

/// Parses "a b - t c" style lists. `(either ...)` types are not supported.
inline std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (e.is_atom("-")) {
      if (i + 1 >= items.size()) syntax_error(e, "missing type after '-'");
      const SExpr& t = items[i + 1];
      if (t.is_list) unsupported(t, "either-types");
      if (pending == 0) syntax_error(e, "type without names");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = t.atom;
      pending = 0;
      ++i;
      continue;
    }
    out.push_back(TypedName{expect_atom(e, "name"), kRootType});
    ++pending;
  }
  return out;
}

inline Rational parse_probability(const SExpr& e) {
  const std::string& s = expect_atom(e, "probability");
  auto parse_int = [&](std::string_view digits) -> std::int64_t {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || p != digits.data() + digits.size() || v < 0)
      syntax_error(e, "malformed probability '" + s + "'");
    return v;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const auto num = parse_int(std::string_view(s).substr(0, slash));
    const auto den = parse_int(std::string_view(s).substr(slash + 1));
    if (den == 0) syntax_error(e, "zero denominator");
    return Rational(num, den);
  }
  const auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(parse_int(s));
  const std::string_view whole = std::string_view(s).substr(0, dot);
  const std::string_view frac = std::string_view(s).substr(dot + 1);
  if (frac.size() > 15) syntax_error(e, "probability has too many decimals");
  std::int64_t den = 1;
  for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
  const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
  const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
  return Rational(w * den + f, den);
}

template <class T>
void append_unique(std::vector<T>& out, const T& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

/// Adds win over deletes inside one outcome, so add and del stay disjoint.
inline void normalize_outcome(Outcome& o) {
  std::erase_if(o.del, [&](const Atom& a) { return std::find(o.add.begin(), o.add.end(), a) != o.add.end(); });
}

class DomainParser {
 public:
  DomainDef parse(std::string_view text) {
    auto exprs = read_sexprs(text);
    if (exprs.size() != 1 || !exprs[0].head_is("define"))
      throw Error(ErrorCode::Syntax, "expected a single (define (domain ...)) form");
    const SExpr& def = exprs[0];
    if (def.items.size() < 2 || !def.items[1].head_is("domain") || def.items[1].items.size() != 2)
      syntax_error(def, "expected (domain <name>)");
    dom_.name = expect_atom(def.items[1].items[1], "domain name");

    // Types and predicates must be known before action schemas are checked.
    for (std::size_t i = 2; i < def.items.size(); ++i) {
      const SExpr& sec = def.items[i];
      expect_list(sec, "domain section");
      if (sec.items.empty()) syntax_error(sec, "empty section");
      const std::string& key = expect_atom(sec.items[0], "section keyword");
      if (key == ":requirements") {
        for (std::size_t k = 1; k < sec.items.size(); ++k)
          dom_.requirements.push_back(expect_atom(sec.items[k], "requirement"));
      } else if (key == ":types") {
        for (auto& tn : parse_typed_list(sec.items, 1)) {
          if (tn.name == kRootType) continue;
          if (dom_.find_type(tn.name)) throw Error(ErrorCode::DuplicateName, "type " + tn.name);
          dom_.types.push_back(TypeDef{tn.name, tn.type});
        }
      } else if (key == ":constants") {
        dom_.constants = parse_typed_list(sec.items, 1);
      } else if (key == ":predicates") {
        for (std::size_t k = 1; k < sec.items.size(); ++k) {
          const SExpr& p = sec.items[k];
          expect_list(p, "predicate declaration");
          if (p.items.empty()) syntax_error(p, "empty predicate declaration");
          declared_.push_back(PredicateDef{expect_atom(p.items[0], "predicate name"), parse_typed_list(p.items, 1), false});
        }
      } else if (key == ":action") {
        continue;
      } else if (key == ":functions") {
        unsupported(sec, "numeric fluents (:functions)");
      } else if (key == ":derived") {
        unsupported(sec, "derived predicates / axioms (:derived)");
      } else if (key == ":constraints") {
        unsupported(sec, "state constraints (:constraints)");
      } else {
        syntax_error(sec, "unknown domain section '" + key + "'");
      }
    }
    finish_vocabulary();
    for (std::size_t i = 2; i < def.items.size(); ++i) {
      const SExpr& sec = def.items[i];
      if (sec.items[0].atom == ":action") dom_.action_schemas.push_back(parse_action(sec));
    }
    std::set<std::string> names;
    for (const auto& a : dom_.action_schemas)
      if (!names.insert(a.name).second) throw Error(ErrorCode::DuplicateName, "action schema " + a.name);
    return std::move(dom_);
  }

 private:
  DomainDef dom_;
  std::vector<PredicateDef> declared_;

  void check_type(const std::string& type) const {
    if (!dom_.has_type(type)) throw Error(ErrorCode::UnknownType, "type '" + type + "' is not declared");
  }

  void finish_vocabulary() {
    for (const auto& t : dom_.types) check_type(t.parent);
    for (const auto& c : dom_.constants) check_type(c.type);
    // Types are represented as unary predicates over their own extent.
    for (const auto& t : dom_.types)
      dom_.predicates.push_back(PredicateDef{t.name, {TypedName{"?x", t.name}}, true});
    for (auto& p : declared_) {
      for (const auto& param : p.params) check_type(param.type);
      if (dom_.find_predicate(p.name)) throw Error(ErrorCode::DuplicateName, "predicate " + p.name);
      dom_.predicates.push_back(std::move(p));
    }
  }

  void check_term(const std::string& term, const std::vector<TypedName>& params) const {
    if (is_variable(term)) {
      for (const auto& p : params)
        if (p.name == term) return;
      throw Error(ErrorCode::Syntax, "variable " + term + " is not a parameter");
    }
    for (const auto& c : dom_.constants)
      if (c.name == term) return;
    throw Error(ErrorCode::UnknownObject, "constant '" + term + "' is not declared in the domain");
  }

  Atom parse_atom(const SExpr& e, const std::vector<TypedName>& params) const {
    expect_list(e, "atom");
    if (e.items.empty()) syntax_error(e, "empty atom");
    Atom a{expect_atom(e.items[0], "predicate"), {}};
    const PredicateDef* p = dom_.find_predicate(a.predicate);
    if (!p) throw Error(ErrorCode::UnknownPredicate, "'" + a.predicate + "' at " + where(e.pos));
    for (std::size_t k = 1; k < e.items.size(); ++k) {
      a.args.push_back(expect_atom(e.items[k], "term"));
      check_term(a.args.back(), params);
    }
    if (a.args.size() != p->arity())
      throw Error(ErrorCode::ArityMismatch, "'" + a.predicate + "' expects " + std::to_string(p->arity()) +
                                                " arguments at " + where(e.pos));
    return a;
  }

  void parse_condition(const SExpr& e, const std::vector<TypedName>& params, Precondition& out) const {
    expect_list(e, "precondition");
    if (e.items.empty()) return;
    const std::string& head = e.items[0].is_atom() ? e.items[0].atom : std::string();
    if (head == "and") {
      for (std::size_t k = 1; k < e.items.size(); ++k) parse_condition(e.items[k], params, out);
    } else if (head == "not") {
      if (e.items.size() != 2) syntax_error(e, "not takes one argument");
      const SExpr& inner = e.items[1];
      if (inner.head_is("=")) {
        out.equalities.push_back(parse_equality(inner, params, true));
      } else {
        out.literals.push_back(Literal{parse_atom(inner, params), true});
      }
    } else if (head == "=") {
      out.equalities.push_back(parse_equality(e, params, false));
    } else if (head == "or" || head == "imply" || head == "exists" || head == "forall") {
      unsupported(e, "'" + head + "' in preconditions");
    } else {
      out.literals.push_back(Literal{parse_atom(e, params), false});
    }
  }

  Equality parse_equality(const SExpr& e, const std::vector<TypedName>& params, bool negated) const {
    if (e.items.size() != 3) syntax_error(e, "= takes two arguments");
    Equality eq{expect_atom(e.items[1], "term"), expect_atom(e.items[2], "term"), negated};
    check_term(eq.lhs, params);
    check_term(eq.rhs, params);
    return eq;
  }

  std::vector<Outcome> parse_effect(const SExpr& e, const std::vector<TypedName>& params) const {
    expect_list(e, "effect");
    if (e.items.empty()) return {Outcome{}};
    const std::string& head = e.items[0].is_atom() ? e.items[0].atom : std::string();
    if (head == "and") {
      std::vector<Outcome> acc{Outcome{}};
      for (std::size_t k = 1; k < e.items.size(); ++k) {
        auto part = parse_effect(e.items[k], params);
        std::vector<Outcome> next;
        for (const auto& a : acc) {
          for (const auto& b : part) {
            Outcome o{a.probability * b.probability, a.add, a.del};
            for (const auto& x : b.add) append_unique(o.add, x);
            for (const auto& x : b.del) append_unique(o.del, x);
            normalize_outcome(o);
            next.push_back(std::move(o));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    if (head == "not") {
      if (e.items.size() != 2) syntax_error(e, "not takes one argument");
      return {Outcome{Rational(1), {}, {parse_atom(e.items[1], params)}}};
    }
    if (head == "probabilistic") {
      if (e.items.size() % 2 != 1) syntax_error(e, "probabilistic expects <p> <effect> pairs");
      std::vector<Outcome> out;
      Rational total(0);
      for (std::size_t k = 1; k < e.items.size(); k += 2) {
        const Rational p = parse_probability(e.items[k]);
        if (p <= Rational(0) || p > Rational(1))
          throw Error(ErrorCode::InvalidProbability, "outcome probability must lie in (0,1] at " + where(e.items[k].pos));
        total += p;
        for (auto o : parse_effect(e.items[k + 1], params)) {
          o.probability *= p;
          out.push_back(std::move(o));
        }
      }
      if (total > Rational(1))
        throw Error(ErrorCode::InvalidProbability, "outcome probabilities sum above 1 at " + where(e.pos));
      if (total < Rational(1)) out.push_back(Outcome{Rational(1) - total, {}, {}});
      return out;
    }
    if (head == "when") unsupported(e, "conditional effects (when)");
    if (head == "forall") unsupported(e, "universally quantified effects (forall)");
    if (head == "increase" || head == "decrease" || head == "assign" || head == "scale-up" || head == "scale-down")
      unsupported(e, "numeric fluents (" + head + ")");
    return {Outcome{Rational(1), {parse_atom(e, params)}, {}}};
  }

  ActionSchema parse_action(const SExpr& sec) const {
    if (sec.items.size() < 2) syntax_error(sec, "action without name");
    ActionSchema a;
    a.name = expect_atom(sec.items[1], "action name");
    a.effect.outcomes = {Outcome{}};
    for (std::size_t k = 2; k < sec.items.size(); k += 2) {
      const std::string& key = expect_atom(sec.items[k], "action keyword");
      if (k + 1 >= sec.items.size()) syntax_error(sec.items[k], "missing value for " + key);
      const SExpr& val = sec.items[k + 1];
      if (key == ":parameters") {
        expect_list(val, "parameter list");
        a.params = parse_typed_list(val.items, 0);
        for (const auto& p : a.params) {
          if (!is_variable(p.name)) syntax_error(val, "parameter '" + p.name + "' must start with '?'");
          check_type(p.type);
        }
      } else if (key == ":precondition") {
        parse_condition(val, a.params, a.precondition);
      } else if (key == ":effect") {
        a.effect.outcomes = parse_effect(val, a.params);
      } else if (key == ":cost") {
        const Rational c = parse_probability(val);
        a.cost = boost::rational_cast<double>(c);
      } else {
        syntax_error(sec.items[k], "unknown action keyword '" + key + "'");
      }
    }
    return a;
  }
};

class ProblemParser {
 public:
  explicit ProblemParser(const DomainDef& dom) : dom_(dom) {}

  ProblemDef parse(std::string_view text) {
    auto exprs = read_sexprs(text);
    if (exprs.size() != 1 || !exprs[0].head_is("define"))
      throw Error(ErrorCode::Syntax, "expected a single (define (problem ...)) form");
    const SExpr& def = exprs[0];
    if (def.items.size() < 2 || !def.items[1].head_is("problem") || def.items[1].items.size() != 2)
      syntax_error(def, "expected (problem <name>)");
    prob_.name = expect_atom(def.items[1].items[1], "problem name");
    const SExpr* goal = nullptr;
    for (std::size_t i = 2; i < def.items.size(); ++i) {
      const SExpr& sec = def.items[i];
      expect_list(sec, "problem section");
      if (sec.items.empty()) syntax_error(sec, "empty section");
      const std::string& key = expect_atom(sec.items[0], "section keyword");
      if (key == ":domain") {
        if (sec.items.size() != 2) syntax_error(sec, "expected (:domain <name>)");
        prob_.domain_name = expect_atom(sec.items[1], "domain name");
        if (prob_.domain_name != dom_.name)
          throw Error(ErrorCode::DomainMismatch,
                      "problem is for domain '" + prob_.domain_name + "', not '" + dom_.name + "'");
      } else if (key == ":objects") {
        prob_.objects = parse_typed_list(sec.items, 1);
        std::set<std::string> seen;
        for (const auto& c : dom_.constants) seen.insert(c.name);
        for (const auto& o : prob_.objects) {
          if (!dom_.has_type(o.type)) throw Error(ErrorCode::UnknownType, "type '" + o.type + "' of object " + o.name);
          if (!seen.insert(o.name).second) throw Error(ErrorCode::DuplicateName, "object " + o.name);
        }
      } else if (key == ":init") {
        init_ = &sec;
      } else if (key == ":goal") {
        if (sec.items.size() != 2) syntax_error(sec, "expected (:goal <formula>)");
        goal = &sec.items[1];
      } else if (key == ":metric") {
        unsupported(sec, "metrics over numeric fluents (:metric)");
      } else if (key == ":requirements") {
        continue;
      } else {
        syntax_error(sec, "unknown problem section '" + key + "'");
      }
    }
    if (prob_.domain_name.empty()) syntax_error(def, "missing (:domain ...)");
    if (init_) {
      for (std::size_t k = 1; k < init_->items.size(); ++k) {
        const SExpr& e = init_->items[k];
        if (e.head_is("=")) unsupported(e, "numeric fluents in :init");
        if (e.head_is("not")) continue;  // closed-world: explicit negatives are redundant
        prob_.init.push_back(parse_ground_atom(e, {}));
      }
    }
    if (!goal) syntax_error(def, "missing (:goal ...)");
    prob_.goal = parse_formula(*goal, {});
    return std::move(prob_);
  }

 private:
  const DomainDef& dom_;
  ProblemDef prob_;
  const SExpr* init_ = nullptr;

  const std::string* object_type(const std::string& name) const {
    for (const auto& c : dom_.constants)
      if (c.name == name) return &c.type;
    for (const auto& o : prob_.objects)
      if (o.name == name) return &o.type;
    return nullptr;
  }

  void check_term(const SExpr& at, const std::string& term, const std::vector<TypedName>& bound) const {
    if (is_variable(term)) {
      for (const auto& v : bound)
        if (v.name == term) return;
      throw Error(ErrorCode::Syntax, "unbound variable " + term + " at " + where(at.pos));
    }
    if (!object_type(term)) throw Error(ErrorCode::UnknownObject, "'" + term + "' at " + where(at.pos));
  }

  Atom parse_ground_atom(const SExpr& e, const std::vector<TypedName>& bound) const {
    expect_list(e, "atom");
    if (e.items.empty()) syntax_error(e, "empty atom");
    Atom a{expect_atom(e.items[0], "predicate"), {}};
    const PredicateDef* p = dom_.find_predicate(a.predicate);
    if (!p) throw Error(ErrorCode::UnknownPredicate, "'" + a.predicate + "' at " + where(e.pos));
    for (std::size_t k = 1; k < e.items.size(); ++k) {
      a.args.push_back(expect_atom(e.items[k], "term"));
      check_term(e.items[k], a.args.back(), bound);
    }
    if (a.args.size() != p->arity())
      throw Error(ErrorCode::ArityMismatch, "'" + a.predicate + "' expects " + std::to_string(p->arity()) +
                                                " arguments at " + where(e.pos));
    if (bound.empty()) {
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (!dom_.is_subtype(*object_type(a.args[k]), p->params[k].type))
          throw Error(ErrorCode::UnknownType, "argument '" + a.args[k] + "' of '" + a.predicate +
                                                  "' is not of type " + p->params[k].type + " at " + where(e.pos));
      }
    }
    return a;
  }

  Formula parse_formula(const SExpr& e, std::vector<TypedName> bound) const {
    expect_list(e, "goal formula");
    Formula f;
    if (e.items.empty()) return f;  // empty conjunction
    const std::string& head = e.items[0].is_atom() ? e.items[0].atom : std::string();
    if (head == "and") {
      f.kind = Formula::Kind::And;
      for (std::size_t k = 1; k < e.items.size(); ++k) f.children.push_back(parse_formula(e.items[k], bound));
    } else if (head == "not") {
      if (e.items.size() != 2) syntax_error(e, "not takes one argument");
      f.kind = Formula::Kind::Not;
      f.children.push_back(parse_formula(e.items[1], bound));
    } else if (head == "imply") {
      if (e.items.size() != 3) syntax_error(e, "imply takes two arguments");
      f.kind = Formula::Kind::Imply;
      f.children.push_back(parse_formula(e.items[1], bound));
      f.children.push_back(parse_formula(e.items[2], bound));
    } else if (head == "forall") {
      if (e.items.size() != 3) syntax_error(e, "forall takes a variable list and a body");
      expect_list(e.items[1], "variable list");
      f.kind = Formula::Kind::Forall;
      f.vars = parse_typed_list(e.items[1].items, 0);
      for (const auto& v : f.vars) {
        if (!is_variable(v.name)) syntax_error(e.items[1], "quantified name must start with '?'");
        if (!dom_.has_type(v.type)) throw Error(ErrorCode::UnknownType, "type '" + v.type + "'");
        bound.push_back(v);
      }
      f.children.push_back(parse_formula(e.items[2], bound));
    } else if (head == "=") {
      if (e.items.size() != 3) syntax_error(e, "= takes two arguments");
      f.kind = Formula::Kind::Equal;
      f.atom.predicate = "=";
      for (int k = 1; k <= 2; ++k) {
        f.atom.args.push_back(expect_atom(e.items[k], "term"));
        check_term(e.items[k], f.atom.args.back(), bound);
      }
    } else if (head == "or" || head == "exists") {
      unsupported(e, "'" + head + "' in goals");
    } else {
      f.kind = Formula::Kind::Atom;
      f.atom = parse_ground_atom(e, bound);
    }
    return f;
  }
};

}  // namespace detail

/// Parses a domain in the supported PPDDL subset: typed STRIPS with negative
/// preconditions, equality and (nested) probabilistic effects.
inline DomainDef parse_domain(std::string_view text) { return detail::DomainParser().parse(text); }

/// Parses a problem against an already parsed domain.
inline ProblemDef parse_problem(std::string_view text, const DomainDef& dom) {
  return detail::ProblemParser(dom).parse(text);
}

}  // namespace gpaplan::ppddl
