#include <gtest/gtest.h>

#include <sstream>

#include "gpaplan/ssp/policy_io.hpp"
#include "gpaplan/solvers/solve.hpp"
#include "support.hpp"

using namespace gpaplan;
using namespace testsupport;

namespace {

/// The named fluents plus every static fact of the initial state.
State with_facts(const GroundSsp& ssp, std::initializer_list<std::string> names) {
  std::vector<char> fluent(ssp.num_facts(), 0);
  for (const auto& a : ssp.actions)
    for (const auto& o : a.outcomes) {
      for (FactId f : o.add) fluent[f] = 1;
      for (FactId f : o.del) fluent[f] = 1;
    }
  State s(ssp.num_facts());
  for (FactId f = 0; f < ssp.num_facts(); ++f)
    if (!fluent[f] && ssp.initial_state.test(f)) s.set(f);
  for (FactId f = 0; f < ssp.num_facts(); ++f)
    for (const auto& n : names)
      if (ssp.fact_name(f) == n) s.set(f);
  return s;
}

const char* kTwin = R"((define (domain twin) (:predicates (p))
  (:action both :parameters () :effect (probabilistic 1/2 (p) 1/2 (p)))
  (:action stay :parameters () :effect (and))))";

std::shared_ptr<const GroundSsp> twin() {
  return ground(bench::parse_instance(kTwin, "(define (problem t) (:domain twin) (:init) (:goal (p)))"));
}

}  // namespace

TEST(State, EqualFactsEqualHash) {
  State a(130), b(130);
  a.set(3);
  a.set(129);
  b.set(129);
  b.set(3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  b.reset(3);
  EXPECT_NE(a, b);
  EXPECT_EQ(a.facts(), (std::vector<FactId>{3, 129}));
}

TEST(Applicable, MatchesBruteForceOnGripperOne) {
  const auto ssp = gripper(1);
  const auto got = applicable_actions(*ssp, ssp->initial_state);
  std::vector<std::string> names;
  for (auto* a : got) names.push_back(a->name);
  std::vector<std::string> expected;
  for (const auto& a : ssp->actions) {
    bool ok = a.statically_enabled;
    for (FactId f : a.pre_pos) ok = ok && ssp->initial_state.test(f);
    for (FactId f : a.pre_neg) ok = ok && !ssp->initial_state.test(f);
    if (ok) expected.push_back(a.name);
  }
  EXPECT_EQ(names, expected);
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"move(rooma,roomb)", "pick(ball1,rooma,left)", "pick(ball1,rooma,right)"}));
  for (std::size_t i = 1; i < got.size(); ++i) EXPECT_LT(got[i - 1]->id, got[i]->id);
}

TEST(Applicable, NegativePreconditionExcludes) {
  const char* dom = R"((define (domain neg) (:predicates (p) (q))
    (:action a :parameters () :precondition (not (p)) :effect (q))))";
  const auto ssp = ground(bench::parse_instance(dom, "(define (problem n) (:domain neg) (:init (p)) (:goal (q)))"));
  EXPECT_TRUE(applicable_actions(*ssp, ssp->initial_state).empty());
}

TEST(Successors, PickSplitsEightyTwenty) {
  const auto ssp = gripper(1);
  const auto& pick = ssp->actions[ssp->find_action("pick(ball1,rooma,left)")];
  const auto succ = successors(*ssp, ssp->initial_state, pick);
  ASSERT_EQ(succ.size(), 2u);
  EXPECT_DOUBLE_EQ(succ[0].probability, 0.8);
  EXPECT_EQ(succ[0].state, with_facts(*ssp, {"(at-robby rooma)", "(carry ball1 left)", "(free right)"}));
  EXPECT_DOUBLE_EQ(succ[1].probability, 0.2);
  EXPECT_EQ(succ[1].state, ssp->initial_state);
  EXPECT_DOUBLE_EQ(succ[0].cost, 1.0);
}

TEST(Successors, DeterministicMoveAndMerging) {
  const auto ssp = gripper(1);
  const auto succ = successors(*ssp, ssp->initial_state, ssp->actions[ssp->find_action("move(rooma,roomb)")]);
  ASSERT_EQ(succ.size(), 1u);
  EXPECT_DOUBLE_EQ(succ[0].probability, 1.0);

  const auto t = twin();
  const auto merged = successors(*t, t->initial_state, t->actions[t->find_action("both()")]);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_DOUBLE_EQ(merged[0].probability, 1.0);
}

TEST(Successors, NotApplicableThrows) {
  const auto ssp = gripper(1);
  try {
    successors(*ssp, ssp->initial_state, ssp->actions[ssp->find_action("move(roomb,rooma)")]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotApplicable);
  }
}

TEST(Successors, ProbabilitiesSumToOneEverywhere) {
  for (auto ssp : {gripper(2), rover(1, 3, 2, 2), ground_files("schedule/domain.ppddl", "schedule/p02.ppddl")}) {
    const auto m = enumerate(*ssp);
    for (std::size_t i = 0; i < m.states.size(); ++i)
      for (const auto* a : applicable_actions(*ssp, m.states[i])) {
        double total = 0.0;
        for (const auto& s : successors(*ssp, m.states[i], *a)) total += s.probability;
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
  }
}

TEST(Successors, GoalIsAbsorbing) {
  const auto ssp = gripper(1);
  const State g = with_facts(*ssp, {"(at-robby roomb)", "(at ball1 roomb)", "(free left)", "(free right)"});
  ASSERT_TRUE(ssp->is_goal(g));
  const auto acts = applicable_actions(*ssp, g);
  ASSERT_FALSE(acts.empty());
  for (const auto* a : acts) {
    const auto succ = successors(*ssp, g, *a);
    ASSERT_EQ(succ.size(), 1u);
    EXPECT_EQ(succ[0].state, g);
    EXPECT_EQ(succ[0].cost, 0.0);
  }
}

TEST(Bellman, HandComputedDrop) {
  const auto ssp = gripper(1);
  StateSpace space(*ssp);
  ValueTable v(space, [&](const State& x) { return ssp->is_goal(x) ? 0.0 : 10.0; });
  const StateId s = space.intern(with_facts(*ssp, {"(at-robby roomb)", "(carry ball1 left)", "(free right)"}));
  const auto b = bellman_backup(space, v, s);
  EXPECT_DOUBLE_EQ(b.value, 1.0);
  ASSERT_TRUE(b.action);
  EXPECT_EQ(ssp->actions[*b.action].name, "drop(ball1,roomb,left)");
}

TEST(Bellman, TiesGoToLowestId) {
  const auto ssp = gripper(1);
  StateSpace space(*ssp);
  ValueTable v(space, [](const State&) { return 0.0; });
  const auto b = bellman_backup(space, v, space.initial());
  ASSERT_TRUE(b.action);
  EXPECT_EQ(*b.action, applicable_actions(*ssp, ssp->initial_state).front()->id);
}

TEST(Bellman, GoalPinnedAndDeadEndInfinite) {
  const auto ssp = ground_files("schedule/domain.ppddl", "schedule/p01.ppddl");
  StateSpace space(*ssp);
  ValueTable v(space, [](const State&) { return 5.0; });
  const StateId dead = space.intern(with_facts(*ssp, {"(queued p1)", "(queued p2)", "(packet-class p1 c1)",
                                                      "(packet-class p2 c1)"}));
  const auto b = bellman_backup(space, v, dead);
  EXPECT_TRUE(is_infinite(b.value));
  EXPECT_FALSE(b.action);

  const StateId goal = space.intern(with_facts(*ssp, {"(alive)", "(served p1)", "(served p2)"}));
  EXPECT_EQ(v.get(goal), 0.0);
  v.set(goal, 7.0);
  EXPECT_EQ(v.get(goal), 0.0);
}

TEST(ValueTable, UnsetWithoutHeuristicThrows) {
  const auto ssp = gripper(1);
  StateSpace space(*ssp);
  ValueTable v(space);
  try {
    v.get(space.initial());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndefinedValue);
  }
}

TEST(StateSpace, LimitEnforced) {
  const auto ssp = gripper(3);
  EXPECT_THROW(value_iteration(std::make_shared<StateSpace>(*ssp, 10), SolverConfig{}), Error);
}

TEST(Proper, OptimalGripperOne) {
  const auto ssp = gripper(1);
  const auto r = value_iteration(*ssp, SolverConfig{});
  EXPECT_TRUE(is_partial_proper(*ssp, r.policy));
  EXPECT_TRUE(oracle_proper(*ssp, r.policy));
}

TEST(Proper, SelfLoopIsNotProper) {
  const auto t = twin();
  Policy pi;
  pi.set(t->initial_state, t->actions[t->find_action("stay()")].id);
  EXPECT_FALSE(is_partial_proper(*t, pi));
  EXPECT_FALSE(is_partial_proper(*t, Policy{}));
}

TEST(Proper, GoalAtStart) {
  const auto ssp = ground(bench::parse_instance(kTwin, "(define (problem t) (:domain twin) (:init (p)) (:goal (p)))"));
  EXPECT_TRUE(is_partial_proper(*ssp, Policy{}));
  EXPECT_EQ(policy_value(*ssp, Policy{}), 0.0);
  const auto ev = evaluate_policy(*ssp, Policy{}, 10, 10, 1);
  EXPECT_EQ(ev.mean_cost, 0.0);
  EXPECT_EQ(ev.goal_rate, 1.0);
}

TEST(Proper, AgreesWithOracleOnRandomPolicies) {
  std::mt19937_64 rng(11);
  const std::vector<std::shared_ptr<const GroundSsp>> problems{
      gripper(2), ground_files("schedule/domain.ppddl", "schedule/p02.ppddl"),
      ground_files("delicate-can/domain.ppddl", "delicate-can/p01.ppddl"), rover(1, 3, 1, 0)};
  int proper = 0, improper = 0;
  for (int k = 0; k < 200; ++k) {
    const auto& ssp = problems[k % problems.size()];
    Policy pi = random_policy(*ssp, rng);
    const bool got = is_partial_proper(*ssp, pi);
    EXPECT_EQ(got, oracle_proper(*ssp, pi));
    (got ? proper : improper)++;
  }
  EXPECT_GT(proper, 0);
  EXPECT_GT(improper, 0);
}

TEST(PolicyValue, ExactGripperOne) {
  const auto ssp = gripper(1);
  const auto r = value_iteration(*ssp, SolverConfig{});
  EXPECT_NEAR(policy_value(*ssp, r.policy), 3.25, 1e-9);
}

TEST(Evaluate, GripperOneMeanAndDeterminism) {
  const auto ssp = gripper(1);
  const auto r = value_iteration(*ssp, SolverConfig{});
  const auto a = evaluate_policy(*ssp, r.policy, 10'000, 100, 42);
  const auto b = evaluate_policy(*ssp, r.policy, 10'000, 100, 42);
  EXPECT_NEAR(a.mean_cost, 3.25, 0.1);
  EXPECT_EQ(a.mean_cost, b.mean_cost);
  EXPECT_EQ(a.std_dev, b.std_dev);
  EXPECT_EQ(a.costs, b.costs);
  EXPECT_EQ(a.goal_rate, 1.0);
}

TEST(Evaluate, UncoveredStateChargedToHorizon) {
  const auto ssp = gripper(1);
  const auto ev = evaluate_policy(*ssp, Policy{}, 5, 30, 0);
  EXPECT_EQ(ev.mean_cost, 30.0);
  EXPECT_EQ(ev.goal_rate, 0.0);
}

TEST(PolicyFile, RoundTripAndStableBytes) {
  const auto ssp = gripper(2);
  const auto r = lao_star(*ssp, SolverConfig{});
  std::ostringstream a, b;
  const PolicyHeader h{ssp->id(), "d.ppddl", "p.ppddl", "lao", r.value_s0, 0};
  write_policy(a, *ssp, r.policy, h);
  write_policy(b, *ssp, r.policy, h);
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  const auto f = read_policy_file(in);
  EXPECT_EQ(f.header.solver, "lao");
  EXPECT_EQ(resolve_policy(*ssp, f), r.policy);
}

TEST(PolicyFile, MalformedRejected) {
  std::istringstream in("not json\n");
  try {
    read_policy_file(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedFile);
  }
}
