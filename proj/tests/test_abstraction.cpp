#include <gtest/gtest.h>

#include <map>

#include "support.hpp"

using namespace gpaplan;
using namespace gpaplan::abstraction;
using namespace testsupport;

namespace {

ObjectId object(const GroundSsp& ssp, const std::string& name) {
  for (ObjectId o = 0; o < ssp.num_objects(); ++o)
    if (ssp.object_names[o] == name) return o;
  throw std::runtime_error("no object " + name);
}

Role role(const Vocabulary& v, std::initializer_list<const char*> preds) {
  Role r;
  for (const char* p : preds) r.push_back(v.predicate_index(p));
  std::sort(r.begin(), r.end());
  return r;
}

State with_facts(const GroundSsp& ssp, const std::vector<std::string>& names) {
  State s(ssp.num_facts());
  for (FactId f = 0; f < ssp.num_facts(); ++f)
    if (std::find(names.begin(), names.end(), ssp.fact_name(f)) != names.end()) s.set(f);
  return s;
}

}  // namespace

TEST(Roles, PairedRoverStateRocks) {
  const auto ssp = rover_pair_state(false);
  const Vocabulary v(*ssp->domain);
  const Abstractor a(v, *ssp);
  const State& s = ssp->initial_state;
  EXPECT_EQ(a.role_of(s, object(*ssp, "r1")), role(v, {"rock"}));
  EXPECT_EQ(a.role_of(s, object(*ssp, "r2")), role(v, {"rock", "interesting"}));
  EXPECT_EQ(a.role_of(s, object(*ssp, "base")), role(v, {"location", "base", "rover-at"}));
  try {
    a.role_of(s, static_cast<ObjectId>(a.num_objects()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownObject);
  }
}

TEST(Roles, UntypedObjectWithoutFactsHasEmptyRole) {
  const char* dom = "(define (domain u) (:predicates (p ?x) (q ?x ?y)) (:action a :parameters (?x) :effect (p ?x)))";
  const auto ssp = ground(bench::parse_instance(dom, "(define (problem u) (:domain u) (:objects a b) (:init (p a)) (:goal (p b)))"));
  const Vocabulary v(*ssp->domain);
  const Abstractor abs(v, *ssp);
  EXPECT_TRUE(abs.role_of(ssp->initial_state, object(*ssp, "b")).empty());
  EXPECT_EQ(abs.role_of(ssp->initial_state, object(*ssp, "a")), role(v, {"p"}));
}

TEST(Roles, PhantomCarriesZeroAryPredicates) {
  const auto ssp = ground_files("schedule/domain.ppddl", "schedule/p01.ppddl");
  const Vocabulary v(*ssp->domain);
  const Abstractor a(v, *ssp);
  EXPECT_EQ(a.num_objects(), ssp->num_objects() + 1);
  EXPECT_EQ(a.role_of(ssp->initial_state, a.phantom()), role(v, {"alive"}));
  const Vocabulary gv(*gripper(1)->domain);
  EXPECT_THROW(Abstractor(gv, *gripper(1)).phantom(), Error);
}

TEST(PhiRole, ExtentsAndPartition) {
  const auto ssp = rover_pair_state(true);
  const Vocabulary v(*ssp->domain);
  const Abstractor a(v, *ssp);
  const State& s = ssp->initial_state;
  std::vector<std::string> names;
  for (ObjectId o : a.phi_role(s, role(v, {"rock"}))) names.push_back(ssp->object_names[o]);
  EXPECT_EQ(names, (std::vector<std::string>{"r1", "r3", "r4", "r5", "r6"}));
  EXPECT_TRUE(a.phi_role(s, role(v, {"rock", "in-rover"})).empty());

  std::map<Role, std::size_t> extents;
  for (const auto& r : a.roles(s)) ++extents[r];
  std::size_t total = 0;
  for (const auto& [r, n] : extents) {
    EXPECT_EQ(a.phi_role(s, r).size(), n);
    total += n;
  }
  EXPECT_EQ(total, a.num_objects());
}

TEST(PhiRelation, PairedRoverStatePartialRelation) {
  const auto ssp = rover_pair_state(false);
  const Vocabulary v(*ssp->domain);
  const Abstractor a(v, *ssp);
  const PredicateId rock_at = ssp->domain->find_predicate("rock-at") - ssp->domain->predicates.data();
  const auto atoms = a.phi_relation(ssp->initial_state, rock_at, {role(v, {"rock"}), role(v, {"location"})});
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_EQ(ssp->fact_name(atoms[0]), "(rock-at r1 l1)");
  EXPECT_TRUE(a.phi_relation(ssp->initial_state, rock_at, {role(v, {"rock", "interesting"}), role(v, {"location"})}).empty());
}

TEST(PhiRelation, FullProductSize) {
  const char* dom = "(define (domain g) (:types a b) (:predicates (r ?x - a ?y - b)) (:action n :parameters () :effect (and)))";
  const char* prob = R"((define (problem g) (:domain g) (:objects x1 x2 x3 - a y1 y2 - b)
    (:init (r x1 y1) (r x1 y2) (r x2 y1) (r x2 y2) (r x3 y1) (r x3 y2)) (:goal (r x1 y1))))";
  const auto ssp = ground(bench::parse_instance(dom, prob));
  const Vocabulary v(*ssp->domain);
  const Abstractor abs(v, *ssp);
  const auto ra = role(v, {"a"}), rb = role(v, {"b"});
  const PredicateId r = ssp->domain->find_predicate("r") - ssp->domain->predicates.data();
  EXPECT_EQ(abs.phi_relation(ssp->initial_state, r, {ra, rb}).size(), 6u);
  EXPECT_EQ(abs.phi_relation(ssp->initial_state, r, {ra, rb}).size(),
            abs.phi_role(ssp->initial_state, ra).size() * abs.phi_role(ssp->initial_state, rb).size());
  EXPECT_EQ(abs.alpha(ssp->initial_state).value(v.predicate_index("r"), {ra, rb}), Truth::One);
}

TEST(Alpha, PairedRoverStateRelationValues) {
  for (bool large : {false, true}) {
    const auto ssp = rover_pair_state(large);
    const Vocabulary v(*ssp->domain);
    const auto s = Abstractor(v, *ssp).alpha(ssp->initial_state);
    const auto rock_at = v.predicate_index("rock-at");
    EXPECT_EQ(s.value(rock_at, {role(v, {"rock"}), role(v, {"location"})}), Truth::Half) << large;
    EXPECT_EQ(s.value(rock_at, {role(v, {"rock", "interesting"}), role(v, {"location", "base", "rover-at"})}), Truth::One)
        << large;
  }
}

TEST(Alpha, PairedRoverStatesDifferOnlyInPlainRocks) {
  const auto small = rover_pair_state(false);
  const auto large = rover_pair_state(true);
  const Vocabulary v(*small->domain);
  const auto a = Abstractor(v, *small).alpha(small->initial_state);
  const auto b = Abstractor(v, *large).alpha(large->initial_state);
  EXPECT_EQ(a.relations, b.relations);
  EXPECT_EQ(a.count(role(v, {"rock"})), 1);
  EXPECT_EQ(b.count(role(v, {"rock"})), 2);
  auto a2 = a;
  for (auto& [r, n] : a2.role_counts)
    if (r == role(v, {"rock"})) n = 2;
  EXPECT_EQ(a2, b);
}

TEST(Alpha, EmptyStateNoObjects) {
  const char* dom = "(define (domain e) (:predicates (p)) (:action a :parameters () :effect (p)))";
  const auto ssp = ground(bench::parse_instance(dom, "(define (problem e) (:domain e) (:init) (:goal (p)))"));
  const Vocabulary v(*ssp->domain);
  const auto s = Abstractor(v, *ssp).alpha(ssp->initial_state);
  ASSERT_EQ(s.role_counts.size(), 1u);  // the phantom with an empty role
  EXPECT_TRUE(s.role_counts[0].first.empty());
  EXPECT_TRUE(s.relations.empty());
}

TEST(Alpha, CountLiftingOnGripper) {
  const auto g2 = gripper(2);
  const Vocabulary v(*g2->domain);
  const auto base = Abstractor(v, *g2).alpha(g2->initial_state);
  for (int b : {3, 5, 9}) {
    const auto g = gripper(b);
    EXPECT_EQ(Abstractor(v, *g).alpha(g->initial_state), base) << b;
  }
  const auto g1 = gripper(1);
  EXPECT_NE(Abstractor(v, *g1).alpha(g1->initial_state), base);
}

TEST(Alpha, RenamingInvariance) {
  const auto a = gripper(3);
  // Same problem with every object renamed and declared in reverse order.
  const char* prob = R"((define (problem renamed) (:domain gripper)
    (:objects gr gl - gripper z y x - ball west east - room)
    (:init (at-robby east) (free gl) (free gr) (at x east) (at y east) (at z east))
    (:goal (and (at x west) (at y west) (at z west)))))";
  const auto b = ground(bench::parse_instance(bench::gripper_domain_text(), prob));
  const std::map<std::string, std::string> rename{{"rooma", "east"}, {"roomb", "west"}, {"ball1", "x"},
                                                  {"ball2", "y"},   {"ball3", "z"},     {"left", "gl"},
                                                  {"right", "gr"}};
  const Vocabulary v(*a->domain);
  const Abstractor aa(v, *a), ab(v, *b);
  const auto m = enumerate(*a);
  for (const auto& s : m.states) {
    std::vector<std::string> names;
    s.for_each_fact([&](FactId f) {
      std::string n = "(" + a->domain->predicates[a->facts[f].predicate].name;
      for (ObjectId o : a->facts[f].args) n += " " + rename.at(a->object_names[o]);
      names.push_back(n + ")");
    });
    EXPECT_EQ(aa.alpha(s), ab.alpha(with_facts(*b, names)));
  }
}

TEST(Alpha, ThreeValuedBoundaryByEnumeration) {
  const auto ssp = ground_files("rover-example/domain.ppddl", "rover-example/problem.ppddl");
  const Vocabulary v(*ssp->domain);
  const Abstractor abs(v, *ssp);
  const auto m = enumerate(*ssp);
  const auto rock_at = static_cast<PredicateId>(ssp->domain->find_predicate("rock-at") - ssp->domain->predicates.data());
  for (const auto& s : m.states) {
    const auto rs = abs.roles(s);
    std::set<Role> realized(rs.begin(), rs.end());
    const auto alpha = abs.alpha(s);
    for (const auto& r1 : realized)
      for (const auto& r2 : realized) {
        const std::size_t n = abs.phi_relation(s, rock_at, {r1, r2}).size();
        const std::size_t full = abs.phi_role(s, r1).size() * abs.phi_role(s, r2).size();
        const Truth want = n == 0 ? Truth::Zero : n == full ? Truth::One : Truth::Half;
        EXPECT_EQ(alpha.value(v.canon_predicate(rock_at), {r1, r2}), want);
      }
  }
}

TEST(Beta, RolesOfArguments) {
  const auto ssp = rover_pair_state(false);
  const Vocabulary v(*ssp->domain);
  const Abstractor abs(v, *ssp);
  const State s = with_facts(*ssp, {"(rover-at l1)", "(base base)", "(interesting r2)", "(in-rover r2)", "(rock-at r1 l1)"});
  const auto& load = ssp->actions[ssp->find_action("load(r2,l1)")];
  const auto b = abs.beta(s, load);
  EXPECT_EQ(v.schema_name(b.schema), "load");
  EXPECT_EQ(b.roles, (std::vector<Role>{role(v, {"rock", "interesting", "in-rover"}), role(v, {"location", "rover-at"})}));
  // Same-role arguments give equal abstract actions.
  const State t = ssp->initial_state;
  EXPECT_EQ(abs.beta(t, ssp->actions[ssp->find_action("move(l1,l2)")]),
            abs.beta(t, ssp->actions[ssp->find_action("move(l2,l1)")]));
}

TEST(Beta, ZeroParameterAction) {
  const char* dom = "(define (domain z) (:predicates (p)) (:action go :parameters () :effect (p)))";
  const auto ssp = ground(bench::parse_instance(dom, "(define (problem z) (:domain z) (:init) (:goal (p)))"));
  const Vocabulary v(*ssp->domain);
  const auto b = Abstractor(v, *ssp).beta(ssp->initial_state, ssp->actions[0]);
  EXPECT_TRUE(b.roles.empty());
  EXPECT_EQ(dump(v, b), "go()");
}

TEST(Dump, RoundTrip) {
  const auto ssp = rover(1, 3, 2, 2);
  const Vocabulary v(*ssp->domain);
  const Abstractor abs(v, *ssp);
  const auto m = enumerate(*ssp);
  for (const auto& s : m.states) {
    const auto a = abs.alpha(s);
    EXPECT_EQ(parse_abstract_state(v, dump(v, a)), a);
    for (const auto* act : applicable_actions(*ssp, s)) {
      const auto b = abs.beta(s, *act);
      EXPECT_EQ(parse_abstract_action(v, dump(v, b)), b);
    }
  }
  EXPECT_THROW(parse_abstract_state(v, "{rover}=3"), Error);
  EXPECT_THROW(parse_abstract_action(v, "navigate({rover})"), Error);
}

TEST(Vocabulary, CanonicalAcrossProblems) {
  const Vocabulary a(*gripper(1)->domain);
  const Vocabulary b(*gripper(7)->domain);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), Vocabulary(*rover(1, 3, 1, 0)->domain).hash());
}

TEST(StateTable, InternsOnce) {
  const auto ssp = gripper(2);
  const Vocabulary v(*ssp->domain);
  const Abstractor abs(v, *ssp);
  AbstractStateTable table;
  const auto m = enumerate(*ssp);
  std::set<AbstractState> distinct;
  for (const auto& s : m.states) {
    const auto a = abs.alpha(s);
    distinct.insert(a);
    EXPECT_EQ(table.get(table.intern(a)), a);
  }
  EXPECT_EQ(table.size(), distinct.size());
}
