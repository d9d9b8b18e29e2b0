#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gpaplan/bench/generators.hpp"
#include "gpaplan/gpa/accelerate.hpp"
#include "gpaplan/gpa/io.hpp"
#include "gpaplan/ppddl/grounder.hpp"

namespace gpaplan::bench {

/// One test or training problem: generator parameters for a built-in
/// domain, or a pair of PPDDL files.
struct InstanceSpec {
  std::vector<int> params;
  std::string domain_file;
  std::string problem_file;

  bool from_files() const { return !domain_file.empty(); }
};

struct ExperimentSpec {
  std::string domain;  // "gripper" or "rover"; may be empty when every instance is a file pair
  std::vector<InstanceSpec> train;
  std::vector<InstanceSpec> test;
  std::vector<std::string> solvers{"lrtdp"};
  std::string train_solver = "lao";
  std::string heuristic = "ff";
  double epsilon = 1e-5;
  double time_limit = std::numeric_limits<double>::infinity();
  std::string gpa_path;  // a saved GPA; otherwise one is learned when train is non-empty
  std::size_t trials = 100;
  std::size_t horizon = 100;
  std::size_t runs = 10;
  std::uint64_t seed = 1;           // run seeds are seed, seed+1, ...
  std::uint64_t instance_seed = 1;  // generator seed for rover placement
  std::size_t threads = 1;
  std::string output;

  void validate() const {
    if (trials < 1 || horizon < 1 || runs < 1) throw Error(ErrorCode::InvalidParam, "trials, horizon and runs must be >= 1");
    if (test.empty()) throw Error(ErrorCode::InvalidParam, "experiment has no test instances");
    if (solvers.empty()) throw Error(ErrorCode::InvalidParam, "experiment has no solvers");
    for (const auto& s : solvers)
      if (!is_solver_id(s)) throw Error(ErrorCode::InvalidParam, "unknown solver '" + s + "'");
    if (!is_solver_id(train_solver)) throw Error(ErrorCode::InvalidParam, "unknown solver '" + train_solver + "'");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidParam, "epsilon must be positive");
    if (threads < 1) throw Error(ErrorCode::InvalidParam, "threads must be >= 1");
    auto check = [&](const InstanceSpec& i) {
      if (i.from_files()) return;
      if (domain == "gripper" && i.params.size() == 1) return;
      if (domain == "rover" && i.params.size() == 4) return;
      throw Error(ErrorCode::InvalidParam, "instance parameters do not fit domain '" + domain + "'");
    };
    for (const auto& i : train) check(i);
    for (const auto& i : test) check(i);
  }
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

inline int bracket_depth(const std::string& s) {
  int depth = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (quoted) continue;
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
  }
  return depth;
}

inline InstanceSpec instance_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  InstanceSpec out;
  if (j.is_array() && !j.empty() && j[0].is_string()) {
    if (j.size() != 2) throw Error(ErrorCode::MalformedFile, "file instance needs [domain, problem]");
    out.domain_file = (base / j[0].get<std::string>()).lexically_normal().string();
    out.problem_file = (base / j[1].get<std::string>()).lexically_normal().string();
    return out;
  }
  if (j.is_number_integer()) {
    out.params.push_back(j.get<int>());
    return out;
  }
  if (!j.is_array()) throw Error(ErrorCode::MalformedFile, "instance must be an integer or an array");
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw Error(ErrorCode::MalformedFile, "generator parameters must be integers");
    out.params.push_back(x.get<int>());
  }
  return out;
}

}  // namespace detail

/// Reads a TOML-style spec: one `key = value` per line, `#` comments, and
/// values written as JSON literals (arrays may span lines). Relative file
/// paths resolve against base_dir.
inline ExperimentSpec parse_spec(std::istream& is, const std::filesystem::path& base_dir = ".") {
  nlohmann::json cfg = nlohmann::json::object();
  std::string line;
  std::string pending_key;
  std::string pending_value;
  std::size_t lineno = 0;
  auto commit = [&] {
    try {
      cfg[pending_key] = nlohmann::json::parse(pending_value);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::MalformedFile, "bad value for '" + pending_key + "'");
    }
    pending_key.clear();
    pending_value.clear();
  };
  while (std::getline(is, line)) {
    ++lineno;
    const std::string text = detail::trim(detail::strip_comment(line));
    if (!pending_key.empty()) {
      pending_value += " " + text;
      if (detail::bracket_depth(pending_value) <= 0) commit();
      continue;
    }
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::MalformedFile, "line " + std::to_string(lineno) + ": expected key = value");
    pending_key = detail::trim(text.substr(0, eq));
    pending_value = detail::trim(text.substr(eq + 1));
    if (pending_key.empty()) throw Error(ErrorCode::MalformedFile, "line " + std::to_string(lineno) + ": empty key");
    if (cfg.contains(pending_key)) throw Error(ErrorCode::MalformedFile, "duplicate key '" + pending_key + "'");
    if (detail::bracket_depth(pending_value) <= 0) commit();
  }
  if (!pending_key.empty()) throw Error(ErrorCode::MalformedFile, "unterminated array for '" + pending_key + "'");

  ExperimentSpec spec;
  try {
    for (const auto& [key, value] : cfg.items()) {
      if (key == "domain") spec.domain = value.get<std::string>();
      else if (key == "train") for (const auto& i : value) spec.train.push_back(detail::instance_from_json(i, base_dir));
      else if (key == "test") for (const auto& i : value) spec.test.push_back(detail::instance_from_json(i, base_dir));
      else if (key == "solver") spec.solvers = {value.get<std::string>()};
      else if (key == "solvers") spec.solvers = value.get<std::vector<std::string>>();
      else if (key == "train_solver") spec.train_solver = value.get<std::string>();
      else if (key == "heuristic") spec.heuristic = value.get<std::string>();
      else if (key == "epsilon") spec.epsilon = value.get<double>();
      else if (key == "time_limit") spec.time_limit = value.get<double>();
      else if (key == "gpa") spec.gpa_path = (base_dir / value.get<std::string>()).lexically_normal().string();
      else if (key == "trials") spec.trials = value.get<std::size_t>();
      else if (key == "horizon") spec.horizon = value.get<std::size_t>();
      else if (key == "runs") spec.runs = value.get<std::size_t>();
      else if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else if (key == "instance_seed") spec.instance_seed = value.get<std::uint64_t>();
      else if (key == "threads") spec.threads = value.get<std::size_t>();
      else if (key == "output") spec.output = (base_dir / value.get<std::string>()).lexically_normal().string();
      else throw Error(ErrorCode::MalformedFile, "unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("wrong value type: ") + e.what());
  }
  spec.validate();
  return spec;
}

inline ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  return parse_spec(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// One CSV line: a solver variant (baseline or GPA-accelerated) on one test
/// instance under one run seed.
struct ResultRow {
  std::string id;
  std::string theta;
  std::string solver;
  std::string gpa;  // "none" or "gpa"
  std::uint64_t run_seed = 0;
  double time_s = 0.0;
  std::size_t backups = 0;
  bool converged = false;
  double cost_mean = 0.0;
  double cost_sd = 0.0;
  double goal_rate = 0.0;

  // Not written to CSV.
  bool proper = false;
  bool used_fallback = false;
  double value_s0 = 0.0;
  std::vector<double> costs;

  /// Equality over every CSV column except the wall time.
  bool same_outcome(const ResultRow& o) const {
    return id == o.id && theta == o.theta && solver == o.solver && gpa == o.gpa && run_seed == o.run_seed &&
           backups == o.backups && converged == o.converged && cost_mean == o.cost_mean && cost_sd == o.cost_sd &&
           goal_rate == o.goal_rate;
  }
};

inline const char* kCsvHeader = "id,theta,solver,gpa,run_seed,time_s,backups,converged,cost_mean,cost_sd,goal_rate";

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::MalformedFile, "unterminated quote in CSV line");
  return out;
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw Error(ErrorCode::MalformedFile, "bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline std::string csv_line(const ResultRow& r) {
  using detail::csv_field;
  using detail::shortest;
  char time[32];
  std::snprintf(time, sizeof time, "%.6f", r.time_s);
  return csv_field(r.id) + ',' + csv_field(r.theta) + ',' + csv_field(r.solver) + ',' + csv_field(r.gpa) + ',' +
         std::to_string(r.run_seed) + ',' + time + ',' + std::to_string(r.backups) + ',' + (r.converged ? "1" : "0") + ',' +
         shortest(r.cost_mean) + ',' + shortest(r.cost_sd) + ',' + shortest(r.goal_rate);
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << csv_line(r) << '\n';
}

inline std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != kCsvHeader) throw Error(ErrorCode::MalformedFile, "missing CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 11) throw Error(ErrorCode::MalformedFile, "CSV row needs 11 fields");
    ResultRow r;
    r.id = f[0];
    r.theta = f[1];
    r.solver = f[2];
    r.gpa = f[3];
    r.run_seed = detail::parse_number<std::uint64_t>(f[4]);
    r.time_s = detail::parse_number<double>(f[5]);
    r.backups = detail::parse_number<std::size_t>(f[6]);
    r.converged = f[7] == "1";
    r.cost_mean = detail::parse_number<double>(f[8]);
    r.cost_sd = detail::parse_number<double>(f[9]);
    r.goal_rate = detail::parse_number<double>(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Instance make_instance(const std::string& domain, const InstanceSpec& spec, std::uint64_t instance_seed) {
  if (spec.from_files()) return parse_instance(read_text(spec.domain_file), read_text(spec.problem_file));
  const auto& p = spec.params;
  if (domain == "gripper" && p.size() == 1) return gen_gripper(p[0]);
  if (domain == "rover" && p.size() == 4) return gen_rover(p[0], p[1], p[2], p[3], instance_seed);
  throw Error(ErrorCode::InvalidParam, "cannot build instance for domain '" + domain + "'");
}

inline std::string theta_text(const InstanceSpec& spec) {
  if (spec.from_files()) return "-";
  std::string out = "(";
  for (std::size_t i = 0; i < spec.params.size(); ++i) out += (i ? "," : "") + std::to_string(spec.params[i]);
  return out + ")";
}

inline SolverConfig solver_config(const ExperimentSpec& spec, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.epsilon = spec.epsilon;
  cfg.heuristic = spec.heuristic;
  cfg.time_limit = spec.time_limit;
  cfg.seed = seed;
  return cfg;
}

/// Solves every training instance with the training solver and learns a GPA
/// from the resulting policies.
inline gpa::Gpa learn_from_spec(const ExperimentSpec& spec) {
  gpa::TrainingSet training;
  for (const auto& t : spec.train) {
    const auto inst = make_instance(spec.domain, t, spec.instance_seed);
    auto ssp = std::make_shared<const GroundSsp>(ppddl::ground(inst.domain, inst.problem));
    const auto r = solve(spec.train_solver, *ssp, solver_config(spec, spec.seed));
    training.push_back(gpa::policy_to_transitions(ssp, r.policy));
  }
  return gpa::learn_gpa(training);
}

struct ExperimentResult {
  std::shared_ptr<const gpa::Gpa> gpa;  // null when neither train nor gpa_path is given
  std::vector<ResultRow> rows;
};

/// Runs every (test instance, solver, run seed) triple: the baseline solver,
/// then the GPA-accelerated variant when a GPA is available. Both policies
/// are simulated with the run seed. Rows come out in a fixed order whatever
/// the thread count.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult out;

  std::vector<Instance> instances;
  std::vector<std::shared_ptr<const GroundSsp>> ssps;
  for (const auto& t : spec.test) {
    instances.push_back(make_instance(spec.domain, t, spec.instance_seed));
    ssps.push_back(std::make_shared<const GroundSsp>(ppddl::ground(instances.back().domain, instances.back().problem)));
  }
  if (!spec.gpa_path.empty()) {
    std::ifstream in(spec.gpa_path);
    if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + spec.gpa_path);
    out.gpa = std::make_shared<const gpa::Gpa>(
        gpa::load_gpa(in, std::make_shared<const abstraction::Vocabulary>(*ssps.front()->domain)));
  } else if (!spec.train.empty()) {
    out.gpa = std::make_shared<const gpa::Gpa>(learn_from_spec(spec));
  }
  const bool accelerated = out.gpa != nullptr;
  const std::size_t variants = accelerated ? 2 : 1;

  struct Task {
    std::size_t instance;
    std::string solver;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < spec.test.size(); ++i)
    for (const auto& s : spec.solvers)
      for (std::size_t r = 0; r < spec.runs; ++r) tasks.push_back(Task{i, s, spec.seed + r});
  out.rows.resize(tasks.size() * variants);

  auto run_task = [&](std::size_t k) {
    const Task& task = tasks[k];
    const GroundSsp& ssp = *ssps[task.instance];
    const SolverConfig cfg = solver_config(spec, task.seed);
    auto fill = [&](ResultRow& row, const std::string& tag) {
      row.id = ssp.id();
      row.theta = theta_text(spec.test[task.instance]);
      row.solver = task.solver;
      row.gpa = tag;
      row.run_seed = task.seed;
    };
    auto simulate = [&](ResultRow& row, const Policy& pi) {
      auto ev = evaluate_policy(ssp, pi, spec.trials, spec.horizon, task.seed);
      row.cost_mean = ev.mean_cost;
      row.cost_sd = ev.std_dev;
      row.goal_rate = ev.goal_rate;
      row.costs = std::move(ev.costs);
      row.proper = is_partial_proper(ssp, pi);
    };

    ResultRow& base = out.rows[k * variants];
    fill(base, "none");
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto r = solve(task.solver, ssp, cfg);
      base.backups = r.stats.backups;
      base.converged = r.stats.converged;
      base.value_s0 = r.value_s0;
      simulate(base, r.policy);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StateSpaceLimitExceeded) throw;
      simulate(base, Policy{});
    }
    base.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!accelerated) return;

    ResultRow& acc = out.rows[k * variants + 1];
    fill(acc, "gpa");
    const auto t1 = std::chrono::steady_clock::now();
    try {
      const auto r = gpa::solve_with_gpa(ssp, out.gpa, task.solver, cfg);
      acc.backups = r.total.backups;
      acc.converged = r.total.converged;
      acc.used_fallback = r.used_fallback;
      acc.value_s0 = r.result.value_s0;
      simulate(acc, r.result.policy);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StateSpaceLimitExceeded) throw;
      simulate(acc, Policy{});
    }
    acc.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  };

  const std::size_t workers = std::min(spec.threads, tasks.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < tasks.size(); ++k) run_task(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
          try {
            run_task(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace gpaplan::bench
