#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ssp/ground_ssp.hpp"

namespace gpaplan::abstraction {

/// Predicates and schemas of a domain in canonical (name-sorted) order. All
/// abstract objects refer to predicates and schemas by canonical index, so
/// they compare equal across problems of the same domain.
class Vocabulary {
 public:
  explicit Vocabulary(const ppddl::DomainDef& dom) {
    for (const auto& p : dom.predicates) predicates_.push_back({p.name, p.arity()});
    std::sort(predicates_.begin(), predicates_.end());
    for (const auto& a : dom.action_schemas) schemas_.push_back({a.name, a.params.size()});
    std::sort(schemas_.begin(), schemas_.end());
    for (const auto& p : dom.predicates) pred_canon_.push_back(predicate_index(p.name));
    for (const auto& a : dom.action_schemas) schema_canon_.push_back(schema_index(a.name));
  }

  std::size_t num_predicates() const { return predicates_.size(); }
  const std::string& predicate_name(std::uint32_t i) const { return predicates_[i].first; }
  std::size_t predicate_arity(std::uint32_t i) const { return predicates_[i].second; }
  const std::string& schema_name(std::uint32_t i) const { return schemas_[i].first; }
  std::size_t schema_arity(std::uint32_t i) const { return schemas_[i].second; }

  std::uint32_t predicate_index(const std::string& name) const { return find(predicates_, name, "predicate"); }
  std::uint32_t schema_index(const std::string& name) const { return find(schemas_, name, "schema"); }

  /// Canonical index of a grounded problem's predicate / schema id.
  std::uint32_t canon_predicate(PredicateId p) const { return pred_canon_[p]; }
  std::uint32_t canon_schema(std::uint32_t s) const { return schema_canon_[s]; }

  /// FNV-1a over "name/arity" of every predicate and schema.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&](const std::string& text) {
      for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
      }
    };
    for (const auto& [n, a] : predicates_) feed("p:" + n + "/" + std::to_string(a) + ";");
    for (const auto& [n, a] : schemas_) feed("a:" + n + "/" + std::to_string(a) + ";");
    return h;
  }

  bool operator==(const Vocabulary& o) const { return predicates_ == o.predicates_ && schemas_ == o.schemas_; }

 private:
  using Entry = std::pair<std::string, std::size_t>;
  static std::uint32_t find(const std::vector<Entry>& v, const std::string& name, const char* what) {
    auto it = std::lower_bound(v.begin(), v.end(), Entry{name, 0},
                               [](const Entry& a, const Entry& b) { return a.first < b.first; });
    if (it == v.end() || it->first != name)
      throw Error(what[0] == 'p' ? ErrorCode::UnknownPredicate : ErrorCode::UnknownSchema, name);
    return static_cast<std::uint32_t>(it - v.begin());
  }

  std::vector<Entry> predicates_;
  std::vector<Entry> schemas_;
  std::vector<std::uint32_t> pred_canon_;
  std::vector<std::uint32_t> schema_canon_;
};

/// Sorted canonical indices of the unary (and, for the phantom object,
/// 0-ary) predicates an object satisfies.
using Role = std::vector<std::uint32_t>;

enum class Truth : std::uint8_t { Zero = 0, Half = 1, One = 2 };

struct Relation {
  std::uint32_t predicate = 0;
  std::vector<Role> roles;
  Truth value = Truth::Zero;

  auto operator<=>(const Relation&) const = default;
  bool operator==(const Relation&) const = default;
};

/// Total valuation of the role counts and role relations of a state, stored
/// sparsely: roles with count 0 and relations with value 0 are omitted.
struct AbstractState {
  std::vector<std::pair<Role, std::uint8_t>> role_counts;  // count in {1, 2}, 2 = more than one
  std::vector<Relation> relations;

  std::uint8_t count(const Role& r) const {
    auto it = std::lower_bound(role_counts.begin(), role_counts.end(), std::pair<Role, std::uint8_t>{r, 0});
    return it != role_counts.end() && it->first == r ? it->second : 0;
  }
  Truth value(std::uint32_t predicate, const std::vector<Role>& roles) const {
    for (const auto& rel : relations)
      if (rel.predicate == predicate && rel.roles == roles) return rel.value;
    return Truth::Zero;
  }

  auto operator<=>(const AbstractState&) const = default;
  bool operator==(const AbstractState&) const = default;
};

struct AbstractAction {
  std::uint32_t schema = 0;
  std::vector<Role> roles;

  auto operator<=>(const AbstractAction&) const = default;
  bool operator==(const AbstractAction&) const = default;
};

inline std::uint8_t cap2(std::size_t n) { return static_cast<std::uint8_t>(std::min<std::size_t>(n, 2)); }

/// Binds a vocabulary to one grounded problem.
class Abstractor {
 public:
  Abstractor(const Vocabulary& vocab, const GroundSsp& ssp) : vocab_(&vocab), ssp_(&ssp) {
    const auto& dom = *ssp.domain;
    type_roles_.resize(ssp.num_objects());
    for (ObjectId o = 0; o < ssp.num_objects(); ++o) {
      std::string t = ssp.object_types[o];
      for (std::size_t guard = 0; guard <= dom.types.size() && t != ppddl::kRootType; ++guard) {
        type_roles_[o].push_back(vocab.predicate_index(t));
        const auto* td = dom.find_type(t);
        if (!td) break;
        t = td->parent;
      }
    }
  }

  const Vocabulary& vocabulary() const { return *vocab_; }
  const GroundSsp& ssp() const { return *ssp_; }

  /// Objects of the abstraction: the problem objects, plus the phantom
  /// object (last id) when the domain has 0-ary predicates.
  std::size_t num_objects() const { return ssp_->num_objects() + (ssp_->has_phantom ? 1 : 0); }
  ObjectId phantom() const {
    if (!ssp_->has_phantom) throw Error(ErrorCode::UnknownObject, "domain has no 0-ary predicates");
    return static_cast<ObjectId>(ssp_->num_objects());
  }

  /// Role of every object in s.
  std::vector<Role> roles(const State& s) const {
    std::vector<Role> out(num_objects());
    for (ObjectId o = 0; o < type_roles_.size(); ++o) out[o] = type_roles_[o];
    s.for_each_fact([&](FactId f) {
      const auto& fact = ssp_->facts[f];
      if (fact.args.size() == 1) {
        out[fact.args[0]].push_back(vocab_->canon_predicate(fact.predicate));
      } else if (fact.args.empty()) {
        out[phantom()].push_back(vocab_->canon_predicate(fact.predicate));
      }
    });
    for (auto& r : out) {
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    return out;
  }

  Role role_of(const State& s, ObjectId o) const {
    if (o >= num_objects()) throw Error(ErrorCode::UnknownObject, "object id " + std::to_string(o));
    return roles(s)[o];
  }

  std::vector<ObjectId> phi_role(const State& s, const Role& psi) const {
    const auto rs = roles(s);
    std::vector<ObjectId> out;
    for (ObjectId o = 0; o < rs.size(); ++o)
      if (rs[o] == psi) out.push_back(o);
    return out;
  }

  /// True atoms of the predicate (grounded id) whose i-th argument has role
  /// psis[i].
  std::vector<FactId> phi_relation(const State& s, PredicateId pred, const std::vector<Role>& psis) const {
    const auto rs = roles(s);
    std::vector<FactId> out;
    s.for_each_fact([&](FactId f) {
      const auto& fact = ssp_->facts[f];
      if (fact.predicate != pred || fact.args.size() != psis.size()) return;
      for (std::size_t i = 0; i < psis.size(); ++i)
        if (rs[fact.args[i]] != psis[i]) return;
      out.push_back(f);
    });
    return out;
  }

  AbstractState alpha(const State& s) const { return alpha(s, roles(s)); }

  AbstractState alpha(const State& s, const std::vector<Role>& rs) const {
    std::map<Role, std::size_t> extent;
    for (const auto& r : rs) ++extent[r];
    AbstractState out;
    for (const auto& [r, n] : extent) out.role_counts.emplace_back(r, cap2(n));
    std::map<std::pair<std::uint32_t, std::vector<Role>>, std::size_t> hits;
    s.for_each_fact([&](FactId f) {
      const auto& fact = ssp_->facts[f];
      if (fact.args.size() < 2) return;
      std::vector<Role> key;
      for (ObjectId o : fact.args) key.push_back(rs[o]);
      ++hits[{vocab_->canon_predicate(fact.predicate), std::move(key)}];
    });
    for (auto& [key, n] : hits) {
      std::size_t full = 1;
      for (const auto& r : key.second) full *= extent[r];
      out.relations.push_back(Relation{key.first, key.second, n == full ? Truth::One : Truth::Half});
    }
    return out;
  }

  AbstractAction beta(const State& s, const GroundAction& a) const { return beta(roles(s), a); }

  AbstractAction beta(const std::vector<Role>& rs, const GroundAction& a) const {
    AbstractAction out{vocab_->canon_schema(a.schema), {}};
    for (ObjectId o : a.args) out.roles.push_back(rs[o]);
    return out;
  }

 private:
  const Vocabulary* vocab_;
  const GroundSsp* ssp_;
  std::vector<Role> type_roles_;
};

inline std::string role_text(const Vocabulary& v, const Role& r) {
  std::string out = "{";
  for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + v.predicate_name(r[i]);
  return out + "}";
}

inline std::string truth_text(Truth t) { return t == Truth::One ? "1" : t == Truth::Half ? "0.5" : "0"; }

/// One line per entry: "{p,q}=n" for role counts, then
/// "pred({..},{..})=0.5|1" for relations; entries separated by "; ".
inline std::string dump(const Vocabulary& v, const AbstractState& s) {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += "; ";
  };
  for (const auto& [r, n] : s.role_counts) {
    sep();
    out += role_text(v, r) + "=" + std::to_string(n);
  }
  for (const auto& rel : s.relations) {
    sep();
    out += v.predicate_name(rel.predicate) + "(";
    for (std::size_t i = 0; i < rel.roles.size(); ++i) out += (i ? "," : "") + role_text(v, rel.roles[i]);
    out += ")=" + truth_text(rel.value);
  }
  return out;
}

inline std::string dump(const Vocabulary& v, const AbstractAction& a) {
  std::string out = v.schema_name(a.schema) + "(";
  for (std::size_t i = 0; i < a.roles.size(); ++i) out += (i ? "," : "") + role_text(v, a.roles[i]);
  return out + ")";
}

namespace detail {

class DumpReader {
 public:
  DumpReader(const Vocabulary& v, std::string_view text) : v_(v), text_(text) {}

  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string name() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::string_view("{}(),=; ").find(text_[pos_]) == std::string_view::npos) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }
  Role role() {
    expect('{');
    Role r;
    if (!peek('}')) {
      do {
        if (!r.empty()) expect(',');
        r.push_back(v_.predicate_index(name()));
      } while (peek(','));
    }
    expect('}');
    if (!std::is_sorted(r.begin(), r.end())) fail("role not in canonical order");
    return r;
  }
  std::vector<Role> role_list() {
    expect('(');
    std::vector<Role> out;
    if (!peek(')')) {
      out.push_back(role());
      while (peek(',')) {
        expect(',');
        out.push_back(role());
      }
    }
    expect(')');
    return out;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedFile, "abstract dump at offset " + std::to_string(pos_) + ": " + what);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }
  const Vocabulary& v_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline AbstractState parse_abstract_state(const Vocabulary& v, std::string_view text) {
  detail::DumpReader in(v, text);
  AbstractState s;
  bool first = true;
  while (!in.done()) {
    if (!first) in.expect(';');
    first = false;
    if (in.peek('{')) {
      Role r = in.role();
      in.expect('=');
      const std::string n = in.name();
      if (n != "1" && n != "2") in.fail("role count must be 1 or 2");
      s.role_counts.emplace_back(std::move(r), static_cast<std::uint8_t>(n[0] - '0'));
    } else {
      Relation rel;
      rel.predicate = v.predicate_index(in.name());
      rel.roles = in.role_list();
      in.expect('=');
      const std::string t = in.name();
      if (t == "1") {
        rel.value = Truth::One;
      } else if (t == "0.5") {
        rel.value = Truth::Half;
      } else {
        in.fail("relation value must be 0.5 or 1");
      }
      s.relations.push_back(std::move(rel));
    }
  }
  if (!std::is_sorted(s.role_counts.begin(), s.role_counts.end()) || !std::is_sorted(s.relations.begin(), s.relations.end()))
    in.fail("entries not in canonical order");
  return s;
}

inline AbstractAction parse_abstract_action(const Vocabulary& v, std::string_view text) {
  detail::DumpReader in(v, text);
  AbstractAction a;
  a.schema = v.schema_index(in.name());
  a.roles = in.role_list();
  if (!in.done()) in.fail("trailing text");
  if (a.roles.size() != v.schema_arity(a.schema)) in.fail("abstract action arity mismatch");
  return a;
}

struct AbstractStateHash {
  std::size_t operator()(const AbstractState& s) const {
    std::size_t h = 0;
    auto mix = [&](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    for (const auto& [r, n] : s.role_counts) {
      for (auto p : r) mix(p);
      mix(1000 + n);
    }
    for (const auto& rel : s.relations) {
      mix(rel.predicate);
      for (const auto& r : rel.roles) {
        mix(r.size());
        for (auto p : r) mix(p);
      }
      mix(static_cast<std::size_t>(rel.value));
    }
    return h;
  }
};

/// Interns abstract states to dense ids; safe for concurrent use.
class AbstractStateTable {
 public:
  using Id = std::uint32_t;

  Id intern(const AbstractState& s) {
    {
      std::shared_lock lock(mutex_);
      auto it = index_.find(s);
      if (it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = index_.emplace(s, static_cast<Id>(states_.size()));
    if (inserted) states_.push_back(s);
    return it->second;
  }

  std::optional<Id> find(const AbstractState& s) const {
    std::shared_lock lock(mutex_);
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  AbstractState get(Id id) const {
    std::shared_lock lock(mutex_);
    return states_[id];
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return states_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<AbstractState, Id, AbstractStateHash> index_;
  std::vector<AbstractState> states_;
};

}  // namespace gpaplan::abstraction
