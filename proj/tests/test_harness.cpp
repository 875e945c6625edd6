#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "spaql/harness.hpp"

using namespace spaql;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("spaql_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec small_spec(Algorithm algorithm) {
  ExperimentSpec spec;
  spec.algorithm = algorithm;
  spec.env.kind = EnvKind::Ambulance;
  spec.env.arrivals = ArrivalKind::Uniform;
  spec.env.cost_weight = 0.0;
  spec.train.episodes = 40;
  spec.train.eval_rollouts = 5;
  spec.n_agents = 3;
  spec.base_seed = 100;
  return spec;
}

}  // namespace

TEST_CASE("aggregate") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto a = aggregate(xs);
  CHECK(a.n == 4);
  CHECK(a.mean == 2.5);
  CHECK(a.std == doctest::Approx(1.2909944487358056));
  CHECK(a.ci95_half_width == doctest::Approx(1.96 * 1.2909944487358056 / 2.0));

  const auto one = aggregate(std::vector<double>{3.5});
  CHECK(one.mean == 3.5);
  CHECK(one.std == 0.0);
  CHECK(one.ci95_half_width == 0.0);
}

TEST_CASE("welch t-test") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  const auto w = welch_t_test(a, b);
  CHECK(w.t == doctest::Approx(-1.0));
  CHECK(w.df == doctest::Approx(8.0));
  CHECK(w.p == doctest::Approx(0.34659350708733416).epsilon(1e-10));

  const std::vector<double> c{4.1, 4.3, 3.9, 4.25, 4.0, 4.4}, d{4.2, 4.22, 4.18, 4.3};
  const auto u = welch_t_test(c, d);
  CHECK(u.t == doctest::Approx(-0.8107737967818652).epsilon(1e-10));
  CHECK(u.df == doctest::Approx(6.073073421956878).epsilon(1e-10));
  CHECK(u.p == doctest::Approx(0.4480949790684148).epsilon(1e-8));

  // Symmetric in its arguments up to the sign of t.
  const auto v = welch_t_test(d, c);
  CHECK(v.t == doctest::Approx(-u.t));
  CHECK(v.p == doctest::Approx(u.p));

  // Identical samples: t = 0, p = 1.
  CHECK(welch_t_test(a, a).p == doctest::Approx(1.0));

  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1.0}, b), std::invalid_argument);
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{2, 2, 2}, std::vector<double>{3, 3}),
                  std::invalid_argument);
}

TEST_CASE("theoretical scaling") {
  CHECK(theoretical_xi(5, 1000, 0.1, 0.0, 1.0) == doctest::Approx(78.12193240547168));
  CHECK(theoretical_xi(5, 1000, 0.1, 1.0, 1.0) == doctest::Approx(82.12193240547168));
  CHECK_THROWS_AS(theoretical_xi(5, 1000, 0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_xi(5, 1000, 1.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("default scaling grid") {
  const auto& xs = default_xi_values();
  REQUIRE(xs.size() == 13);
  CHECK(xs.front() == 0.01);
  CHECK(xs.back() == 5.0);
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "# oil instance\n"
      "env = oil\n"
      "survey=quadratic   # sharp\n"
      "lambda = 50\n"
      "horizon = 7\n"
      "xi = 0.5, 1\n"
      "agents = 4\n"
      "\n");
  ExperimentSpec spec;
  apply_config(cfg, spec);
  CHECK(spec.env.kind == EnvKind::Oil);
  CHECK(spec.env.survey == SurveyKind::Quadratic);
  CHECK(spec.env.lambda == 50.0);
  CHECK(spec.env.horizon == 7);
  CHECK(spec.train.horizon == 7);
  CHECK(spec.train.scaling == 0.5);
  CHECK(spec.n_agents == 4);

  CHECK(parse_real_list("0.5, 1,2") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK_THROWS_AS(parse_real_list("0.5,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("no equals sign"), std::invalid_argument);
  ExperimentSpec other;
  CHECK_THROWS_AS(apply_config({{"colour", "blue"}}, other), std::invalid_argument);
  CHECK_THROWS_AS(apply_config({{"episodes", "12x"}}, other), std::invalid_argument);
  CHECK_THROWS_AS(read_config_file("/nonexistent/spaql.cfg"), std::runtime_error);
}

TEST_CASE("experiments log K + 1 entries per agent") {
  for (Algorithm alg : {Algorithm::Spaql, Algorithm::Aql, Algorithm::Random}) {
    const auto r = run_experiment(small_spec(alg));
    REQUIRE(r.logs.size() == 3);
    for (const auto& log : r.logs) CHECK(log.iterations() == 41);
    CHECK(r.reward.n == 3);
    CHECK(r.reward.mean == doctest::Approx(sample_mean(r.final_rewards())));
  }
}

TEST_CASE("agent i uses seed base + i") {
  const auto spec = small_spec(Algorithm::Spaql);
  const auto r = run_experiment(spec);
  const auto env = make_environment(spec.env);
  TrainConfig cfg = spec.train;
  cfg.seed = 102;
  CHECK(r.logs[2] == train(*env, cfg));
}

TEST_CASE("results do not depend on the worker count") {
  auto spec = small_spec(Algorithm::Spaql);
  spec.threads = 1;
  const auto serial = run_experiment(spec);
  spec.threads = 3;
  const auto parallel = run_experiment(spec);
  CHECK(serial.logs == parallel.logs);
}

TEST_CASE("export writes curves, summary and partitions") {
  const fs::path dir = scratch_dir("export");
  const auto spaql = run_experiment(small_spec(Algorithm::Spaql));
  const auto aql = run_experiment(small_spec(Algorithm::Aql));
  const auto w = welch_t_test(spaql.final_rewards(), aql.final_rewards());
  export_results({&spaql, &aql}, dir, {{"spaql_vs_aql", w}});

  CHECK(count_lines(dir / "curves.csv") == 1 + 2 * 41);
  std::ifstream curves(dir / "curves.csv");
  std::string header;
  std::getline(curves, header);
  CHECK(header == "algorithm,xi,iteration,mean_reward,ci95,mean_arms");

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  REQUIRE(summary["experiments"].size() == 2);
  CHECK(summary["experiments"][0]["label"] == "spaql");
  CHECK(summary["experiments"][0]["final_rewards"].size() == 3);
  CHECK(summary["experiments"][0]["reward"]["mean"].get<double>() ==
        doctest::Approx(spaql.reward.mean).epsilon(1e-11));
  REQUIRE(summary["tests"].size() == 1);
  CHECK(summary["tests"][0]["p"].get<double>() == doctest::Approx(w.p).epsilon(1e-11));
  CHECK(summary["tests"][0]["significant_at_0.05"].get<bool>() == (w.p < 0.05));

  for (int i = 0; i < 3; ++i) {
    const fs::path p = dir / ("partition_spaql_" + std::to_string(i) + ".csv");
    REQUIRE(fs::exists(p));
    CHECK(static_cast<std::int64_t>(count_lines(p)) == 1 + spaql.logs[i].final_arms());
    std::int64_t aql_rows = 0;
    for (int h = 1; h <= 5; ++h) {
      const fs::path q =
          dir / ("partition_aql_" + std::to_string(i) + "_h" + std::to_string(h) + ".csv");
      REQUIRE(fs::exists(q));
      aql_rows += static_cast<std::int64_t>(count_lines(q)) - 1;
    }
    CHECK(aql_rows == aql.logs[i].final_arms());
  }
  fs::remove_all(dir);
}

TEST_CASE("reruns produce byte-identical output") {
  const fs::path a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
  auto spec = small_spec(Algorithm::Spaql);
  spec.output_dir = a;
  run_experiment(spec);
  spec.output_dir = b;
  run_experiment(spec);
  for (const char* f : {"curves.csv", "summary.json", "partition_spaql_1.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("export reports unwritable paths") {
  const auto r = run_experiment(small_spec(Algorithm::Random));
  CHECK_THROWS_AS(export_results({&r}, "/proc/spaql_cannot_write_here"), std::runtime_error);
}

TEST_CASE("scaling sweep") {
  auto spec = small_spec(Algorithm::Aql);
  spec.train.episodes = 20;
  spec.n_agents = 2;
  const auto& xs = default_xi_values();
  const auto sweep = scaling_sweep(spec, xs);
  REQUIRE(sweep.reward.size() == 13);
  REQUIRE(sweep.runs.size() == 13);
  std::vector<double> means;
  for (std::size_t j = 0; j < 13; ++j) {
    CHECK(sweep.runs[j].spec.train.scaling == xs[j]);
    CHECK(sweep.reward[j].mean == doctest::Approx(sweep.runs[j].reward.mean));
    CHECK(sweep.reward[sweep.best_index].mean >= sweep.reward[j].mean);
    means.push_back(sweep.reward[j].mean);
  }
  CHECK(sweep.across_xi_std == doctest::Approx(std::sqrt(sample_variance(means))));

  // Matches a standalone run at the same scaling.
  auto single = spec;
  single.train.scaling = xs[4];
  CHECK(run_experiment(single).logs == sweep.runs[4].logs);

  const fs::path dir = scratch_dir("sweep");
  spec.output_dir = dir;
  const auto persisted = scaling_sweep(spec, {0.5, 1.0}, false);
  CHECK(persisted.runs.empty());
  CHECK(count_lines(dir / "sweep.csv") == 3);
  CHECK(fs::exists(dir / "xi_0.5" / "curves.csv"));
  fs::remove_all(dir);

  CHECK_THROWS_AS(scaling_sweep(spec, {}), std::invalid_argument);
}

TEST_CASE("spec validation") {
  auto spec = small_spec(Algorithm::Spaql);
  spec.n_agents = 0;
  CHECK_THROWS_AS(run_experiment(spec), std::invalid_argument);
  spec = small_spec(Algorithm::Spaql);
  spec.env.horizon = 6;
  CHECK_THROWS_AS(run_experiment(spec), std::invalid_argument);
  CHECK(parse_algorithm("aql") == Algorithm::Aql);
  CHECK_THROWS_AS(parse_algorithm("dqn"), std::invalid_argument);
  CHECK(parse_action_rule("center") == ActionRule::Center);
}
