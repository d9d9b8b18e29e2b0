#pragma once

// Independent oracles for the test suites. Nothing here goes through
// StateSpace, ValueTable or the solvers: the reachable space is enumerated
// with plain successor generation and solved with dense synchronous sweeps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <set>
#include <unordered_map>
#include <vector>

#include "gpaplan/bench/experiment.hpp"
#include "gpaplan/gpa/accelerate.hpp"
#include "gpaplan/ppddl/grounder.hpp"

namespace testsupport {

using namespace gpaplan;

inline std::string fixture(const std::string& rel) { return std::string(GPAPLAN_FIXTURE_DIR) + "/" + rel; }

inline std::shared_ptr<const GroundSsp> ground(const bench::Instance& i) {
  return std::make_shared<const GroundSsp>(ppddl::ground(i.domain, i.problem));
}

inline std::shared_ptr<const GroundSsp> ground_files(const std::string& dom, const std::string& prob) {
  return ground(bench::parse_instance(bench::read_text(fixture(dom)), bench::read_text(fixture(prob))));
}

inline std::shared_ptr<const GroundSsp> gripper(int b) { return ground(bench::gen_gripper(b)); }
inline std::shared_ptr<const GroundSsp> rover(int r, int w, int s, int o, std::uint64_t seed = 1) {
  return ground(bench::gen_rover(r, w, s, o, seed));
}

/// Explicit model of the reachable part of a problem.
struct Model {
  struct Out {
    std::size_t dest;
    double p;
    double cost;
  };
  struct Act {
    ActionId id;
    std::vector<Out> outs;
  };
  std::vector<State> states;
  std::vector<char> goal;
  std::vector<std::vector<Act>> acts;
  std::unordered_map<State, std::size_t, StateHash> index;
};

/// Cost override for a transition; returning infinity forbids it.
using CostFn = std::function<double(const State&, const GroundAction&, const State&, double)>;

inline Model enumerate(const GroundSsp& ssp, const CostFn& cost_fn = {}, std::size_t limit = 200'000) {
  Model m;
  auto add = [&](const State& s) {
    auto [it, fresh] = m.index.emplace(s, m.states.size());
    if (fresh) {
      if (m.states.size() >= limit) throw Error(ErrorCode::StateSpaceLimitExceeded, "oracle limit");
      m.states.push_back(s);
      m.goal.push_back(ssp.is_goal(s));
      m.acts.emplace_back();
    }
    return it->second;
  };
  add(ssp.initial_state);
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    if (m.goal[i]) continue;
    const State s = m.states[i];
    for (const auto& a : ssp.actions) {
      if (!a.applicable(s)) continue;
      Model::Act act{a.id, {}};
      for (const auto& o : a.outcomes) {
        if (o.probability <= 0.0) continue;
        State next = s;
        for (FactId f : o.del) next.reset(f);
        for (FactId f : o.add) next.set(f);
        const double c = cost_fn ? cost_fn(s, a, next, a.cost) : a.cost;
        const std::size_t d = add(next);
        auto hit = std::find_if(act.outs.begin(), act.outs.end(), [&](const Model::Out& x) { return x.dest == d; });
        if (hit != act.outs.end()) {
          hit->p += o.probability;
        } else {
          act.outs.push_back({d, o.probability, c});
        }
      }
      m.acts[i].push_back(std::move(act));
    }
  }
  return m;
}

inline bool finite_act(const Model::Act& a) {
  return std::all_of(a.outs.begin(), a.outs.end(), [](const Model::Out& o) { return std::isfinite(o.cost); });
}

/// States that can reach the goal with probability 1 using finite-cost
/// actions, by the classic nested fixpoint.
inline std::vector<char> almost_sure(const Model& m) {
  const std::size_t n = m.states.size();
  std::vector<char> keep(n, 1);
  for (bool changed = true; changed;) {
    std::vector<char> reach(m.goal.begin(), m.goal.end());
    for (std::size_t i = 0; i < n; ++i) reach[i] = reach[i] && keep[i];
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i] || reach[i]) continue;
        for (const auto& a : m.acts[i]) {
          if (!finite_act(a)) continue;
          bool inside = true, hits = false;
          for (const auto& o : a.outs) {
            inside = inside && keep[o.dest];
            hits = hits || reach[o.dest];
          }
          if (inside && hits) {
            reach[i] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    changed = reach != keep;
    keep = std::move(reach);
  }
  return keep;
}

/// Full-sweep synchronous value iteration from zero. States outside the
/// almost-sure set get infinity.
inline std::vector<double> oracle_values(const Model& m, double tol = 1e-10) {
  const std::size_t n = m.states.size();
  const auto ok = almost_sure(m);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!ok[i]) v[i] = inf;
  for (std::size_t sweep = 0; sweep < 10'000'000; ++sweep) {
    std::vector<double> next = v;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m.goal[i] || !ok[i]) continue;
      double best = inf;
      for (const auto& a : m.acts[i]) {
        if (!finite_act(a)) continue;
        double q = 0.0;
        bool inside = true;
        for (const auto& o : a.outs) {
          inside = inside && ok[o.dest];
          q += o.p * (o.cost + v[o.dest]);
        }
        if (inside) best = std::min(best, q);
      }
      next[i] = best;
      res = std::max(res, std::abs(best - v[i]));
    }
    v = std::move(next);
    if (res < tol) break;
  }
  return v;
}

inline double oracle_v0(const GroundSsp& ssp, const CostFn& cost_fn = {}) {
  return oracle_values(enumerate(ssp, cost_fn))[0];
}

/// Cost function of the GPA-constrained problem, computed straight from
/// the abstraction functions and the automaton.
inline CostFn gpa_cost(const GroundSsp& ssp, std::shared_ptr<const gpa::Gpa> g) {
  auto abs = std::make_shared<abstraction::Abstractor>(g->vocabulary(), ssp);
  return [abs, g, &ssp](const State& s, const GroundAction& a, const State& t, double c) {
    if (ssp.is_goal(s)) return 0.0;
    return g->is_consistent(abs->alpha(s), abs->beta(s, a), abs->alpha(t)) ? c : std::numeric_limits<double>::infinity();
  };
}

/// Probability-1 goal reachability of a fixed policy: the fixpoint of
/// "some successor is good" restricted to the policy's closure, then every
/// state in the closure must be good.
inline bool oracle_proper(const GroundSsp& ssp, const Policy& pi) {
  std::vector<State> order{ssp.initial_state};
  std::unordered_map<State, std::size_t, StateHash> idx{{ssp.initial_state, 0}};
  std::vector<std::vector<std::size_t>> succ(1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const State s = order[i];
    if (ssp.is_goal(s)) continue;
    auto a = pi.action(s);
    if (!a || !ssp.actions[*a].applicable(s)) return false;
    for (const auto& o : ssp.actions[*a].outcomes) {
      if (o.probability <= 0.0) continue;
      State next = s;
      for (FactId f : o.del) next.reset(f);
      for (FactId f : o.add) next.set(f);
      auto [it, fresh] = idx.emplace(next, order.size());
      if (fresh) {
        order.push_back(next);
        succ.emplace_back();
      }
      succ[i].push_back(it->second);
    }
  }
  std::vector<char> good(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) good[i] = ssp.is_goal(order[i]);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (good[i]) continue;
      if (std::any_of(succ[i].begin(), succ[i].end(), [&](std::size_t j) { return good[j] != 0; })) {
        good[i] = 1;
        grew = true;
      }
    }
  }
  return std::all_of(good.begin(), good.end(), [](char g) { return g != 0; });
}

/// A random policy over its own reachable closure.
inline Policy random_policy(const GroundSsp& ssp, std::mt19937_64& rng) {
  Policy pi;
  std::vector<State> order{ssp.initial_state};
  std::unordered_map<State, char, StateHash> seen{{ssp.initial_state, 1}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const State s = order[i];
    if (ssp.is_goal(s)) continue;
    auto acts = applicable_actions(ssp, s);
    if (acts.empty()) continue;
    const GroundAction* a = acts[rng() % acts.size()];
    pi.set(s, a->id);
    for (auto& t : successors(ssp, s, *a))
      if (seen.emplace(t.state, 1).second) order.push_back(t.state);
  }
  return pi;
}

/// Copy of g with a random subset of hyperedges and destinations removed
/// and a few random edges added.
inline gpa::Gpa corrupt(const gpa::Gpa& g, std::mt19937_64& rng, double keep = 0.7) {
  gpa::Gpa out(g.vocabulary_ptr());
  for (gpa::VertexId v = 0; v < g.num_vertices(); ++v) out.add_vertex(g.vertex(v));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<abstraction::AbstractAction> labels;
  for (const auto& [key, dests] : g.edges()) {
    labels.push_back(key.second);
    std::set<gpa::VertexId> kept;
    for (auto d : dests)
      if (u(rng) < keep) kept.insert(d);
    if (!kept.empty() && u(rng) < keep) out.add_edge(key.first, key.second, kept);
  }
  const std::size_t n = g.num_vertices();
  for (std::size_t k = 0; n > 0 && !labels.empty() && k < 3; ++k)
    out.add_edge(static_cast<gpa::VertexId>(rng() % n), labels[rng() % labels.size()],
                 {static_cast<gpa::VertexId>(rng() % n)});
  return out;
}

/// Two rover states with matching role structure: s1 has rocks
/// r1 (plain, at l1) and r2 (interesting, at the base) over locations l1, l2
/// and base; s2 has six rocks, r2 the only interesting one and at the base,
/// over four locations. The rover sits at the base in both.
inline std::shared_ptr<const GroundSsp> rover_pair_state(bool large) {
  const std::string dom = bench::read_text(fixture("rover-example/domain.ppddl"));
  std::string p = "(define (problem fig2) (:domain rover-example) (:objects ";
  if (!large) {
    p += "l1 l2 base - location r1 r2 - rock) (:init (rover-at base) (base base) (interesting r2)"
         " (rock-at r1 l1) (rock-at r2 base))";
  } else {
    p += "l1 l2 l3 base - location r1 r2 r3 r4 r5 r6 - rock) (:init (rover-at base) (base base) (interesting r2)"
         " (rock-at r1 l1) (rock-at r3 l1) (rock-at r4 l2) (rock-at r5 l3) (rock-at r6 l3) (rock-at r2 base))";
  }
  p += " (:goal (forall (?x) (imply (rock ?x) (rock-at ?x base)))))";
  return ground(bench::parse_instance(dom, p));
}

}  // namespace testsupport
