#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "gpaplan/abstraction/abstraction.hpp"
#include "gpaplan/error.hpp"
#include "gpaplan/ssp/policy.hpp"

namespace gpaplan::gpa {

using abstraction::AbstractAction;
using abstraction::AbstractState;
using abstraction::Vocabulary;
using VertexId = std::uint32_t;

/// Generalized policy automaton: abstract states as vertices and
/// action-labeled hyperedges. Edges are keyed by (source, action), so two
/// edges with equal source and label are always merged into one whose
/// destination set is the union.
class Gpa {
 public:
  using EdgeKey = std::pair<VertexId, AbstractAction>;

  explicit Gpa(std::shared_ptr<const Vocabulary> vocab) : vocab_(std::move(vocab)) {}

  const Vocabulary& vocabulary() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const { return vocab_; }

  VertexId add_vertex(const AbstractState& s) {
    auto [it, inserted] = index_.emplace(s, static_cast<VertexId>(vertices_.size()));
    if (inserted) vertices_.push_back(s);
    return it->second;
  }

  std::optional<VertexId> find_vertex(const AbstractState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  void add_transition(const AbstractState& src, const AbstractAction& act, const AbstractState& dest) {
    const VertexId s = add_vertex(src);
    const VertexId d = add_vertex(dest);
    edges_[{s, act}].insert(d);
  }

  void add_edge(VertexId src, const AbstractAction& act, std::set<VertexId> dests) {
    if (dests.empty()) throw Error(ErrorCode::InvalidParam, "hyperedge with no destination");
    if (src >= vertices_.size()) throw Error(ErrorCode::InvalidParam, "unknown source vertex");
    for (VertexId d : dests)
      if (d >= vertices_.size()) throw Error(ErrorCode::InvalidParam, "unknown destination vertex");
    edges_[{src, act}].merge(dests);
  }

  bool is_consistent(VertexId src, const AbstractAction& act, VertexId dest) const {
    auto it = edges_.find({src, act});
    return it != edges_.end() && it->second.count(dest);
  }

  bool is_consistent(const AbstractState& src, const AbstractAction& act, const AbstractState& dest) const {
    auto s = find_vertex(src);
    auto d = find_vertex(dest);
    return s && d && is_consistent(*s, act, *d);
  }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const AbstractState& vertex(VertexId v) const { return vertices_[v]; }
  const std::map<EdgeKey, std::set<VertexId>>& edges() const { return edges_; }

  /// Value-level form used for structural equality: vertex ids replaced by
  /// the abstract states they name.
  struct Canonical {
    std::set<AbstractState> vertices;
    std::set<std::tuple<AbstractState, AbstractAction, std::set<AbstractState>>> edges;
    bool operator==(const Canonical&) const = default;
  };

  Canonical canonical() const {
    Canonical c;
    c.vertices.insert(vertices_.begin(), vertices_.end());
    for (const auto& [key, dests] : edges_) {
      std::set<AbstractState> ds;
      for (VertexId d : dests) ds.insert(vertices_[d]);
      c.edges.emplace(vertices_[key.first], key.second, std::move(ds));
    }
    return c;
  }

  bool operator==(const Gpa& o) const { return *vocab_ == *o.vocab_ && canonical() == o.canonical(); }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<AbstractState> vertices_;
  std::unordered_map<AbstractState, VertexId, abstraction::AbstractStateHash> index_;
  std::map<EdgeKey, std::set<VertexId>> edges_;
};

struct GroundTransition {
  State source;
  ActionId action = 0;
  State dest;
};

/// Transitions of one solved problem.
struct Transitions {
  std::shared_ptr<const GroundSsp> ssp;
  std::vector<GroundTransition> triples;
};

using TrainingSet = std::vector<Transitions>;

/// All (s, pi(s), s') with positive probability for the states reachable
/// under pi from the initial state.
inline Transitions policy_to_transitions(std::shared_ptr<const GroundSsp> ssp, const Policy& pi) {
  Transitions out{ssp, {}};
  std::vector<State> order{ssp->initial_state};
  std::unordered_map<State, char, StateHash> seen{{ssp->initial_state, 1}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const State s = order[i];
    if (ssp->is_goal(s)) continue;
    auto a = pi.action(s);
    if (!a) throw Error(ErrorCode::PolicyIncomplete, "policy undefined on a reachable state");
    if (!ssp->actions[*a].applicable(s)) throw Error(ErrorCode::PolicyIncomplete, ssp->actions[*a].name + " not applicable");
    for (auto& succ : successors(*ssp, s, ssp->actions[*a])) {
      out.triples.push_back(GroundTransition{s, *a, succ.state});
      if (seen.emplace(succ.state, 1).second) order.push_back(succ.state);
    }
  }
  return out;
}

/// Adds the abstraction of every training triple to a copy of gpa.
inline Gpa merge_into(Gpa gpa, const TrainingSet& training) {
  for (const auto& tau : training) {
    if (!(Vocabulary(*tau.ssp->domain) == gpa.vocabulary()))
      throw Error(ErrorCode::DomainMismatch, "training data from domain '" + tau.ssp->domain->name + "'");
    abstraction::Abstractor abs(gpa.vocabulary(), *tau.ssp);
    for (const auto& t : tau.triples) {
      const auto src_roles = abs.roles(t.source);
      gpa.add_transition(abs.alpha(t.source, src_roles), abs.beta(src_roles, tau.ssp->actions[t.action]), abs.alpha(t.dest));
    }
  }
  return gpa;
}

inline Gpa learn_gpa(std::shared_ptr<const Vocabulary> vocab, const TrainingSet& training) {
  return merge_into(Gpa(std::move(vocab)), training);
}

inline Gpa learn_gpa(const TrainingSet& training) {
  if (training.empty()) throw Error(ErrorCode::InvalidParam, "empty training set needs an explicit vocabulary");
  return learn_gpa(std::make_shared<const Vocabulary>(*training.front().ssp->domain), training);
}

}  // namespace gpaplan::gpa
