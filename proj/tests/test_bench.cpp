#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace gpaplan;
using namespace gpaplan::bench;
using namespace testsupport;

namespace {

ExperimentSpec spec_from(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in, GPAPLAN_FIXTURE_DIR);
}

ErrorCode spec_error(const std::string& text) {
  try {
    spec_from(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Syntax;
}

}  // namespace

TEST(Generators, GripperValues) {
  EXPECT_NEAR(oracle_v0(*gripper(1)), 3.25, 1e-9);
  EXPECT_NEAR(oracle_v0(*gripper(2)), 5.5, 0.1);
}

TEST(Generators, RoverValues) {
  const double v = oracle_v0(*rover(1, 3, 1, 2));
  EXPECT_NEAR(v, 6.62, 0.3);
  EXPECT_LT(oracle_v0(*rover(1, 3, 1, 0)), v);
  for (int s = 1; s <= 4; ++s) EXPECT_FALSE(is_infinite(oracle_v0(*rover(1, 3, s, 1, 7 + s))));
}

TEST(Generators, RoverFixturesMatchGenerator) {
  const int params[][4] = {{1, 3, 1, 2}, {1, 3, 2, 2}, {1, 4, 3, 2}, {1, 4, 4, 2}};
  for (int k = 0; k < 4; ++k) {
    const auto gen = gen_rover(params[k][0], params[k][1], params[k][2], params[k][3], 1);
    EXPECT_EQ(read_text(fixture("rover/p0" + std::to_string(k + 1) + ".ppddl")), gen.problem_text) << k;
  }
}

TEST(Spec, ParsesAllKeys) {
  const auto s = spec_from(R"(# comment
domain = "rover"
train = [[1, 3, 1, 2],
         [1, 3, 2, 2]]   # two instances
test = [[1, 4, 4, 2], ["rover/domain.ppddl", "rover/p01.ppddl"]]
solvers = ["lrtdp", "soft-flares"]
train_solver = "vi"
heuristic = "hadd"
epsilon = 1e-4
time_limit = 30
gpa = "x.json"
trials = 50
horizon = 80
runs = 2
seed = 9
instance_seed = 3
threads = 2
output = "out.csv"
)");
  EXPECT_EQ(s.domain, "rover");
  ASSERT_EQ(s.train.size(), 2u);
  EXPECT_EQ(s.train[1].params, (std::vector<int>{1, 3, 2, 2}));
  ASSERT_EQ(s.test.size(), 2u);
  EXPECT_TRUE(s.test[1].from_files());
  EXPECT_EQ(s.test[1].problem_file, fixture("rover/p01.ppddl"));
  EXPECT_EQ(s.solvers, (std::vector<std::string>{"lrtdp", "soft-flares"}));
  EXPECT_EQ(s.train_solver, "vi");
  EXPECT_EQ(s.heuristic, "hadd");
  EXPECT_EQ(s.epsilon, 1e-4);
  EXPECT_EQ(s.time_limit, 30.0);
  EXPECT_EQ(s.trials, 50u);
  EXPECT_EQ(s.horizon, 80u);
  EXPECT_EQ(s.runs, 2u);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.instance_seed, 3u);
  EXPECT_EQ(s.threads, 2u);
  EXPECT_EQ(theta_text(s.test[0]), "(1,4,4,2)");
  EXPECT_EQ(theta_text(s.test[1]), "-");
}

TEST(Spec, Defaults) {
  const auto s = spec_from("domain = \"gripper\"\ntest = [2]\n");
  EXPECT_EQ(s.trials, 100u);
  EXPECT_EQ(s.horizon, 100u);
  EXPECT_EQ(s.runs, 10u);
  EXPECT_EQ(s.epsilon, 1e-5);
  EXPECT_EQ(s.solvers, (std::vector<std::string>{"lrtdp"}));
}

TEST(Spec, Errors) {
  EXPECT_EQ(spec_error("domain \"gripper\"\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [1, 2\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [1]\ncolour = 3\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [1]\ntest = [2]\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [1]\nruns = \"many\"\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [1]\nruns = 0\n"), ErrorCode::InvalidParam);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [[1, 2]]\n"), ErrorCode::InvalidParam);
  EXPECT_EQ(spec_error("domain = \"gripper\"\ntest = [1]\nsolver = \"dfs\"\n"), ErrorCode::InvalidParam);
  EXPECT_EQ(spec_error("domain = \"gripper\"\n"), ErrorCode::InvalidParam);
}

TEST(Spec, ShippedSamplesLoad) {
  for (const char* name : {"gripper.toml", "rover.toml"}) {
    const auto s = load_spec(std::string(GPAPLAN_FIXTURE_DIR) + "/../samples/" + name);
    EXPECT_FALSE(s.test.empty()) << name;
    EXPECT_FALSE(s.train.empty()) << name;
  }
}

TEST(Csv, RoundTripWithQuoting) {
  ResultRow r;
  r.id = "rover-1-4-4-2";
  r.theta = "(1,4,4,2)";
  r.solver = "soft-flares";
  r.gpa = "gpa";
  r.run_seed = 12;
  r.time_s = 0.125;
  r.backups = 4242;
  r.converged = true;
  r.cost_mean = 14.37;
  r.cost_sd = 0.1 + 0.2;
  r.goal_rate = 1.0;
  std::ostringstream os;
  write_csv(os, {r, r});
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kCsvHeader);
  EXPECT_NE(os.str().find("\"(1,4,4,2)\""), std::string::npos);
  std::istringstream in(os.str());
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(back[0].same_outcome(r));
  EXPECT_EQ(back[0].cost_sd, r.cost_sd);
  std::istringstream bad("id,theta\n");
  EXPECT_THROW(read_csv(bad), Error);
}

TEST(Experiment, RowsCsvAndStatistics) {
  auto spec = spec_from("domain = \"gripper\"\ntrain = [1, 2]\ntest = [3, 4]\nsolvers = [\"lrtdp\", \"lao\"]\n"
                        "runs = 2\ntrials = 40\nhorizon = 60\nseed = 5\n");
  const auto res = run_experiment(spec);
  ASSERT_TRUE(res.gpa);
  ASSERT_EQ(res.rows.size(), 2u * 2 * 2 * 2);
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    const auto& r = res.rows[k];
    EXPECT_EQ(r.gpa, k % 2 ? "gpa" : "none");
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(r.proper);
    EXPECT_GE(r.cost_sd, 0.0);
    EXPECT_GE(r.time_s, 0.0);
    ASSERT_EQ(r.costs.size(), 40u);
    double sum = 0.0;
    for (double c : r.costs) sum += c;
    const double mean = sum / 40.0;
    double ss = 0.0;
    for (double c : r.costs) ss += (c - mean) * (c - mean);
    EXPECT_NEAR(r.cost_mean, mean, 1e-12);
    EXPECT_NEAR(r.cost_sd, std::sqrt(ss / 39.0), 1e-12);
  }
  EXPECT_EQ(res.rows[0].run_seed, 5u);
  EXPECT_EQ(res.rows[2].run_seed, 6u);

  std::ostringstream os;
  write_csv(os, res.rows);
  std::istringstream in(os.str());
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), res.rows.size());
  for (std::size_t k = 0; k < back.size(); ++k) EXPECT_TRUE(back[k].same_outcome(res.rows[k])) << k;
}

TEST(Experiment, SingleRunSingleTrial) {
  const auto res = run_experiment(spec_from("domain = \"gripper\"\ntest = [2, 3]\nruns = 1\ntrials = 1\n"));
  EXPECT_FALSE(res.gpa);
  ASSERT_EQ(res.rows.size(), 2u);
  EXPECT_EQ(res.rows[0].theta, "(2)");
  EXPECT_EQ(res.rows[1].theta, "(3)");
}

TEST(Experiment, ThreadCountDoesNotChangeRows) {
  auto spec = spec_from("domain = \"rover\"\ntrain = [[1, 3, 1, 2], [1, 3, 2, 2]]\ntest = [[1, 3, 3, 2], [1, 4, 3, 1]]\n"
                        "solvers = [\"lrtdp\", \"soft-flares\"]\nruns = 2\ntrials = 30\n");
  const auto one = run_experiment(spec);
  spec.threads = 4;
  const auto four = run_experiment(spec);
  ASSERT_EQ(one.rows.size(), four.rows.size());
  for (std::size_t k = 0; k < one.rows.size(); ++k) EXPECT_TRUE(one.rows[k].same_outcome(four.rows[k])) << k;
}

TEST(Experiment, FileInstancesAndSavedGpa) {
  const std::string gpa_file = ::testing::TempDir() + "/rover-gpa.json";
  {
    auto spec = spec_from("domain = \"rover\"\ntrain = [[1, 3, 1, 2], [1, 3, 2, 2]]\ntest = [[1, 3, 1, 2]]\nruns = 1\n");
    std::ofstream out(gpa_file);
    gpa::save_gpa(out, learn_from_spec(spec), "rover");
  }
  std::ostringstream text;
  text << "test = [[\"rover/domain.ppddl\", \"rover/p03.ppddl\"]]\ngpa = \"" << gpa_file << "\"\nruns = 1\ntrials = 20\n";
  const auto res = run_experiment(spec_from(text.str()));
  ASSERT_EQ(res.rows.size(), 2u);
  EXPECT_EQ(res.rows[0].theta, "-");
  EXPECT_EQ(res.rows[1].gpa, "gpa");
  EXPECT_TRUE(res.rows[1].proper);
}

TEST(Experiment, TimeoutRecordedNotFatal) {
  const auto res = run_experiment(
      spec_from("domain = \"rover\"\ntrain = [[1, 3, 1, 2]]\ntest = [[1, 4, 5, 2]]\ntime_limit = 0\nruns = 1\ntrials = 5\n"));
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& r : res.rows) EXPECT_FALSE(r.converged);
}
