#ifndef SPAQL_HARNESS_HPP
#define SPAQL_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spaql/environments.hpp"
#include "spaql/spaql.hpp"
#include "spaql/stats.hpp"

namespace spaql {

enum class Algorithm { Spaql, Aql, Random };

std::string to_string(Algorithm a);
std::string to_string(ActionRule r);
ActionRule parse_action_rule(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::Spaql;
  EnvConfig env;
  TrainConfig train;
  int n_agents = 1;
  std::uint64_t base_seed = 0;
  // Empty: results are not persisted.
  std::filesystem::path output_dir;
  // 0: one worker per hardware thread.
  unsigned threads = 0;

  void validate() const;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<TrainingLog> logs;  // indexed by agent
  AggregateResult reward;
  AggregateResult arms;

  std::vector<double> final_rewards() const;
  std::vector<double> final_arms() const;
};

/// Trains one agent with seed base_seed + index.
TrainingLog train_agent(const ExperimentSpec& spec, int agent_index);

/// Random-action baseline with the same logging cadence as the learners:
/// every entry is the mean of N random episodes.
TrainingLog random_train(const Environment& env, const TrainConfig& cfg);

ExperimentResult run_experiment(const ExperimentSpec& spec);

const std::vector<double>& default_xi_values();

struct SweepResult {
  Algorithm algorithm = Algorithm::Spaql;
  std::vector<double> xi;
  std::vector<AggregateResult> reward;
  std::vector<AggregateResult> arms;
  // Mean and sample standard deviation of the per-xi mean final rewards.
  double across_xi_mean = 0.0;
  double across_xi_std = 0.0;
  std::size_t best_index = 0;
  // Full runs; empty when the sweep was asked not to keep them.
  std::vector<ExperimentResult> runs;

  double best_xi() const { return xi[best_index]; }
};

/// One experiment per xi. All (xi, agent) jobs share one worker pool.
SweepResult scaling_sweep(const ExperimentSpec& spec, const std::vector<double>& xi_values,
                          bool keep_runs = true);

/// 2 sqrt(H^3 ln(4HK / delta)) + 4 L d_max. Throws for delta outside (0,1].
double theoretical_xi(int horizon, int episodes, double delta, double lipschitz, double d_max);

struct LongHorizonReport {
  ExperimentResult spaql;
  ExperimentResult aql;
  // Per SPAQL agent: first iteration whose reward is >= 95% of its final reward.
  std::vector<int> spaql_iteration_to_95;
  double spaql_mean_arms = 0.0;
  double aql_mean_arms = 0.0;
  double max_reward = 0.0;
};

/// Two SPAQL and two AQL agents on oil / Laplace / lambda = 1 with H = 50.
/// Environment, horizon and agent count in `spec` are overridden.
LongHorizonReport long_horizon_scenario(ExperimentSpec spec);

struct CompareReport {
  SweepResult spaql;
  SweepResult aql;
  ExperimentResult spaql_best;
  ExperimentResult aql_best;
  ExperimentResult random;
  std::optional<WelchResult> spaql_vs_aql;
};

/// SPAQL vs AQL (each at its best xi from `xi_values`) vs random on one instance.
CompareReport compare(const ExperimentSpec& spec, const std::vector<double>& xi_values);

struct NamedTest {
  std::string name;
  WelchResult result;
};

/// Writes curves.csv, summary.json and one partition_<agent>.csv per trained
/// partition. Throws std::runtime_error naming the path on I/O failure.
void export_results(const std::vector<const ExperimentResult*>& results,
                    const std::filesystem::path& dir, const std::vector<NamedTest>& tests = {});

/// Formats with 12 significant digits.
std::string format_real(double v);

using ConfigMap = std::map<std::string, std::string>;

/// Parses a flat `key = value` file; '#' starts a comment.
ConfigMap read_config_file(const std::filesystem::path& path);
ConfigMap parse_config(const std::string& text);

/// Applies recognized keys to `spec`; throws std::invalid_argument for
/// unknown keys or malformed values.
void apply_config(const ConfigMap& cfg, ExperimentSpec& spec);

/// Parses a comma separated list of reals.
std::vector<double> parse_real_list(const std::string& text);

}  // namespace spaql

#endif  // SPAQL_HARNESS_HPP
