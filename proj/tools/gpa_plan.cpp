// gpa-plan: command-line front end for planning, GPA learning, accelerated
// planning, experiments and policy simulation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "gpaplan/bench/experiment.hpp"
#include "gpaplan/gpa/accelerate.hpp"
#include "gpaplan/gpa/io.hpp"
#include "gpaplan/ppddl/grounder.hpp"
#include "gpaplan/ssp/policy_io.hpp"

namespace fs = std::filesystem;
using namespace gpaplan;

namespace {

struct Loaded {
  bench::Instance instance;
  std::shared_ptr<const GroundSsp> ssp;
};

Loaded load_problem(const std::string& domain_file, const std::string& problem_file) {
  Loaded out{bench::parse_instance(bench::read_text(domain_file), bench::read_text(problem_file)), nullptr};
  out.ssp = std::make_shared<const GroundSsp>(ppddl::ground(out.instance.domain, out.instance.problem));
  return out;
}

// Paths in a policy header are tried as written, then relative to the
// directory holding the policy file.
std::string locate(const std::string& path, const fs::path& policy_file) {
  if (path.empty() || fs::exists(path)) return path;
  const fs::path alt = policy_file.parent_path() / path;
  return fs::exists(alt) ? alt.string() : path;
}

PolicyFile read_policy_path(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path);
  return read_policy_file(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path);
  out << text;
}

std::string value_text(double v) {
  if (is_infinite(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void report(const SolveResult& r, const SolveStats& total) {
  std::cout << "value_s0 " << value_text(r.value_s0) << "\n"
            << "backups " << total.backups << "\n"
            << "states " << total.states_expanded << "\n"
            << "converged " << (total.converged ? "yes" : "no") << "\n"
            << "time_s " << value_text(total.wall_time) << "\n"
            << "policy_entries " << r.policy.size() << "\n";
}

struct SolverFlags {
  std::string solver = "lrtdp";
  std::string heuristic = "ff";
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  double time_limit = std::numeric_limits<double>::infinity();

  void add(CLI::App* app) {
    app->add_option("--solver", solver, "vi, lao, lrtdp or soft-flares")
        ->check(CLI::IsMember({"vi", "lao", "lrtdp", "soft-flares"}));
    app->add_option("--heuristic", heuristic, "ff, hadd or zero")->check(CLI::IsMember({"ff", "hadd", "zero"}));
    app->add_option("--epsilon", epsilon, "convergence threshold")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "solver seed");
    app->add_option("--time-limit", time_limit, "seconds")->check(CLI::NonNegativeNumber);
  }

  SolverConfig config() const {
    SolverConfig c;
    c.epsilon = epsilon;
    c.heuristic = heuristic;
    c.seed = seed;
    c.time_limit = time_limit;
    return c;
  }
};

void save_policy(const std::string& path, const Loaded& p, const std::string& domain_file, const std::string& problem_file,
                 const std::string& solver, const SolveResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path);
  write_policy(out, *p.ssp, r.policy, PolicyHeader{p.ssp->id(), domain_file, problem_file, solver, r.value_s0, 0});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic planning with generalized policy automata"};
  app.require_subcommand(1);

  // plan
  SolverFlags plan_flags;
  std::string plan_domain, plan_problem, plan_out;
  auto* plan = app.add_subcommand("plan", "Solve a PPDDL problem and write its policy");
  plan_flags.add(plan);
  plan->add_option("domain", plan_domain)->required()->check(CLI::ExistingFile);
  plan->add_option("problem", plan_problem)->required()->check(CLI::ExistingFile);
  plan->add_option("-o,--output", plan_out, "policy file");

  // learn-gpa
  std::vector<std::string> learn_policies;
  std::string learn_out;
  auto* learn = app.add_subcommand("learn-gpa", "Learn a GPA from solved policies");
  learn->add_option("--policies", learn_policies, "policy files")->required()->check(CLI::ExistingFile);
  learn->add_option("-o,--output", learn_out, "GPA file")->required();

  // accel-plan
  SolverFlags accel_flags;
  std::string accel_gpa, accel_domain, accel_problem, accel_out;
  auto* accel = app.add_subcommand("accel-plan", "Solve a problem with GPA acceleration");
  accel_flags.add(accel);
  accel->add_option("--gpa", accel_gpa, "GPA file")->required()->check(CLI::ExistingFile);
  accel->add_option("domain", accel_domain)->required()->check(CLI::ExistingFile);
  accel->add_option("problem", accel_problem)->required()->check(CLI::ExistingFile);
  accel->add_option("-o,--output", accel_out, "policy file");

  // bench
  std::string bench_spec, bench_out;
  std::size_t bench_threads = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment spec and write CSV rows");
  bench_cmd->add_option("--spec", bench_spec, "experiment spec")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("-o,--output", bench_out, "CSV file (default: spec output, else stdout)");
  bench_cmd->add_option("--threads", bench_threads, "worker threads (overrides the spec)");

  // eval
  std::string eval_policy, eval_domain, eval_problem;
  std::size_t eval_trials = 100, eval_horizon = 100;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Simulate a policy file");
  eval->add_option("--policy", eval_policy, "policy file")->required()->check(CLI::ExistingFile);
  eval->add_option("--domain", eval_domain, "domain file (default: from the policy header)");
  eval->add_option("--trials", eval_trials)->check(CLI::PositiveNumber);
  eval->add_option("--horizon", eval_horizon)->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed);
  eval->add_option("problem", eval_problem, "problem file (default: from the policy header)");

  // gen
  std::string gen_domain_name, gen_domain_out, gen_problem_out;
  std::vector<int> gen_params;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a gripper or rover instance");
  gen->add_option("domain", gen_domain_name)->required()->check(CLI::IsMember({"gripper", "rover"}));
  gen->add_option("params", gen_params, "gripper: b; rover: r w s o")->required();
  gen->add_option("--seed", gen_seed, "rover placement seed");
  gen->add_option("--domain-out", gen_domain_out, "write the domain file here");
  gen->add_option("-o,--output", gen_problem_out, "problem file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      const auto p = load_problem(plan_domain, plan_problem);
      const auto r = solve(plan_flags.solver, *p.ssp, plan_flags.config());
      report(r, r.stats);
      if (!plan_out.empty()) save_policy(plan_out, p, plan_domain, plan_problem, plan_flags.solver, r);
    } else if (learn->parsed()) {
      gpa::TrainingSet training;
      for (const auto& path : learn_policies) {
        const auto f = read_policy_path(path);
        const auto p = load_problem(locate(f.header.domain_file, path), locate(f.header.problem_file, path));
        training.push_back(gpa::policy_to_transitions(p.ssp, resolve_policy(*p.ssp, f)));
      }
      const auto g = gpa::learn_gpa(training);
      std::ofstream out(learn_out, std::ios::binary);
      if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + learn_out);
      gpa::save_gpa(out, g, training.front().ssp->domain->name);
      std::cout << "vertices " << g.num_vertices() << "\nedges " << g.num_edges() << "\n";
    } else if (accel->parsed()) {
      const auto p = load_problem(accel_domain, accel_problem);
      std::ifstream in(accel_gpa);
      auto g = std::make_shared<const gpa::Gpa>(
          gpa::load_gpa(in, std::make_shared<const abstraction::Vocabulary>(*p.ssp->domain)));
      const auto r = gpa::solve_with_gpa(*p.ssp, g, accel_flags.solver, accel_flags.config());
      report(r.result, r.total);
      std::cout << "fallback " << (r.used_fallback ? "yes" : "no") << "\n";
      if (!accel_out.empty()) save_policy(accel_out, p, accel_domain, accel_problem, accel_flags.solver + "+gpa", r.result);
    } else if (bench_cmd->parsed()) {
      auto spec = bench::load_spec(bench_spec);
      if (bench_threads > 0) spec.threads = bench_threads;
      const auto res = bench::run_experiment(spec);
      const std::string target = bench_out.empty() ? spec.output : bench_out;
      if (target.empty()) {
        bench::write_csv(std::cout, res.rows);
      } else {
        std::ofstream out(target, std::ios::binary);
        if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + target);
        bench::write_csv(out, res.rows);
        std::cout << "rows " << res.rows.size() << " -> " << target << "\n";
      }
    } else if (eval->parsed()) {
      const auto f = read_policy_path(eval_policy);
      const auto p = load_problem(eval_domain.empty() ? locate(f.header.domain_file, eval_policy) : eval_domain,
                                  eval_problem.empty() ? locate(f.header.problem_file, eval_policy) : eval_problem);
      const auto st = evaluate_policy(*p.ssp, resolve_policy(*p.ssp, f), eval_trials, eval_horizon, eval_seed);
      std::cout << "cost_mean " << value_text(st.mean_cost) << "\ncost_sd " << value_text(st.std_dev) << "\ngoal_rate "
                << value_text(st.goal_rate) << "\n";
    } else if (gen->parsed()) {
      bench::Instance inst;
      if (gen_domain_name == "gripper") {
        if (gen_params.size() != 1) throw Error(ErrorCode::InvalidParam, "gripper takes one parameter b");
        inst = bench::gen_gripper(gen_params[0]);
      } else {
        if (gen_params.size() != 4) throw Error(ErrorCode::InvalidParam, "rover takes parameters r w s o");
        inst = bench::gen_rover(gen_params[0], gen_params[1], gen_params[2], gen_params[3], gen_seed);
      }
      if (!gen_domain_out.empty()) write_text_file(gen_domain_out, inst.domain_text);
      if (gen_problem_out.empty()) {
        std::cout << inst.problem_text;
      } else {
        write_text_file(gen_problem_out, inst.problem_text);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
