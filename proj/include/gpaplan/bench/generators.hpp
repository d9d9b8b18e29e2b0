#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gpaplan/error.hpp"
#include "gpaplan/ppddl/parser.hpp"

namespace gpaplan::bench {

struct Instance {
  std::string domain_text;
  std::string problem_text;
  ppddl::DomainDef domain;
  ppddl::ProblemDef problem;
};

inline Instance parse_instance(std::string domain_text, std::string problem_text) {
  Instance inst{std::move(domain_text), std::move(problem_text), {}, {}};
  inst.domain = ppddl::parse_domain(inst.domain_text);
  inst.problem = ppddl::parse_problem(inst.problem_text, inst.domain);
  return inst;
}

inline const char* gripper_domain_text() {
  return R"((define (domain gripper)
  (:requirements :typing :probabilistic-effects :negative-preconditions :equality)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room)
               (at ?b - ball ?r - room)
               (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from) (not (= ?from ?to)))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (probabilistic 0.8 (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g)))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
)";
}

/// Gripper(b): b balls start in room A and must all reach room B.
inline Instance gen_gripper(int b) {
  if (b < 1) throw Error(ErrorCode::InvalidParam, "gripper needs at least one ball");
  std::ostringstream p;
  p << "(define (problem gripper-" << b << ")\n  (:domain gripper)\n  (:objects rooma roomb - room";
  for (int i = 1; i <= b; ++i) p << " ball" << i;
  p << " - ball left right - gripper)\n  (:init (at-robby rooma) (free left) (free right)";
  for (int i = 1; i <= b; ++i) p << " (at ball" << i << " rooma)";
  p << ")\n  (:goal (and";
  for (int i = 1; i <= b; ++i) p << " (at ball" << i << " roomb)";
  p << ")))\n";
  return parse_instance(gripper_domain_text(), p.str());
}

inline const char* rover_domain_text() {
  return R"((define (domain rover)
  (:requirements :typing :probabilistic-effects :negative-preconditions :universal-preconditions)
  (:types rover waypoint sample objective)
  (:predicates (at ?r - rover ?w - waypoint)
               (connected ?from - waypoint ?to - waypoint)
               (base ?w - waypoint)
               (sample-at ?s - sample ?w - waypoint)
               (holding ?r - rover ?s - sample)
               (carried ?s - sample)
               (delivered ?s - sample)
               (visible-from ?o - objective ?w - waypoint)
               (have-image ?o - objective))
  (:action navigate
    :parameters (?r - rover ?from - waypoint ?to - waypoint)
    :precondition (and (at ?r ?from) (connected ?from ?to))
    :effect (and (at ?r ?to) (not (at ?r ?from))))
  (:action collect
    :parameters (?r - rover ?s - sample ?w - waypoint)
    :precondition (and (at ?r ?w) (sample-at ?s ?w))
    :effect (probabilistic 0.6 (and (holding ?r ?s) (carried ?s) (not (sample-at ?s ?w)))))
  (:action drop
    :parameters (?r - rover ?s - sample ?w - waypoint)
    :precondition (and (at ?r ?w) (base ?w) (holding ?r ?s))
    :effect (and (delivered ?s) (not (holding ?r ?s)) (not (carried ?s))))
  (:action take-image
    :parameters (?r - rover ?o - objective ?w - waypoint)
    :precondition (and (at ?r ?w) (visible-from ?o ?w))
    :effect (have-image ?o))
)
)";
}

/// Rover(r, w, s, o). Waypoint wp0 is the base and every rover starts
/// there; waypoints are fully connected. Samples lie at seeded random
/// non-base waypoints. Objectives are visible from the base only, so images
/// never depend on where the samples happen to lie.
inline Instance gen_rover(int r, int w, int s, int o, std::uint64_t seed = 1) {
  if (r < 1 || w < 2 || s < 1 || o < 0) throw Error(ErrorCode::InvalidParam, "rover needs r>=1, w>=2, s>=1, o>=0");
  std::mt19937_64 rng(seed);
  std::ostringstream p;
  p << "(define (problem rover-" << r << '-' << w << '-' << s << '-' << o << ")\n  (:domain rover)\n  (:objects";
  for (int i = 1; i <= r; ++i) p << " rover" << i;
  p << " - rover";
  for (int i = 0; i < w; ++i) p << " wp" << i;
  p << " - waypoint";
  for (int i = 1; i <= s; ++i) p << " sample" << i;
  p << " - sample";
  if (o > 0) {
    for (int i = 1; i <= o; ++i) p << " objective" << i;
    p << " - objective";
  }
  p << ")\n  (:init (base wp0)";
  for (int i = 1; i <= r; ++i) p << " (at rover" << i << " wp0)";
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < w; ++b)
      if (a != b) p << " (connected wp" << a << " wp" << b << ")";
  for (int i = 1; i <= s; ++i) p << " (sample-at sample" << i << " wp" << 1 + rng() % static_cast<std::uint64_t>(w - 1) << ")";
  for (int i = 1; i <= o; ++i) {
    p << " (visible-from objective" << i << " wp0)";
  }
  p << ")\n  (:goal (and (forall (?x) (imply (sample ?x) (delivered ?x)))";
  for (int i = 1; i <= o; ++i) p << " (have-image objective" << i << ")";
  p << ")))\n";
  return parse_instance(rover_domain_text(), p.str());
}

}  // namespace gpaplan::bench
