#include "spaql/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "spaql/aql.hpp"

namespace spaql {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index so ordering never depends on completion order.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

double round12(double v) { return std::stod(format_real(v)); }

template <typename T>
std::vector<double> final_values(const std::vector<TrainingLog>& logs, T TrainingLog::*field) {
  std::vector<double> out;
  out.reserve(logs.size());
  for (const auto& log : logs) out.push_back(static_cast<double>((log.*field).back()));
  return out;
}

void summarize(ExperimentResult& r) {
  const auto rewards = r.final_rewards();
  const auto arms = r.final_arms();
  r.reward = aggregate(rewards);
  r.arms = aggregate(arms);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return os;
}

void check_written(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

nlohmann::json to_json(const AggregateResult& a) {
  return {{"mean", round12(a.mean)},
          {"std", round12(a.std)},
          {"ci95_half_width", round12(a.ci95_half_width)},
          {"n", a.n}};
}

nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json env = {{"env", to_string(s.env.kind)}, {"horizon", s.env.horizon}};
  if (s.env.kind == EnvKind::Oil) {
    env["survey"] = to_string(s.env.survey);
    env["lambda"] = round12(s.env.lambda);
  } else {
    env["arrivals"] = to_string(s.env.arrivals);
    env["cost_weight"] = round12(s.env.cost_weight);
  }
  return {{"algorithm", to_string(s.algorithm)},
          {"environment", env},
          {"episodes", s.train.episodes},
          {"rollouts", s.train.eval_rollouts},
          {"xi", round12(s.train.scaling)},
          {"tau_min", round12(s.train.tau_min)},
          {"tau_max", round12(s.train.tau_max)},
          {"u", round12(s.train.u0)},
          {"d", round12(s.train.d)},
          {"reset_splits", s.train.reset_splits},
          {"train_action", to_string(s.train.train_action)},
          {"eval_action", to_string(s.train.eval_action)},
          {"agents", s.n_agents},
          {"base_seed", s.base_seed}};
}

std::vector<double> rounded(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(round12(x));
  return out;
}

}  // namespace

std::string to_string(ActionRule r) { return r == ActionRule::Center ? "center" : "uniform"; }

ActionRule parse_action_rule(const std::string& s) {
  if (s == "center") return ActionRule::Center;
  if (s == "uniform") return ActionRule::Uniform;
  throw std::invalid_argument("unknown action rule '" + s + "' (expected center|uniform)");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Spaql: return "spaql";
    case Algorithm::Aql: return "aql";
    case Algorithm::Random: return "random";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "spaql") return Algorithm::Spaql;
  if (s == "aql") return Algorithm::Aql;
  if (s == "random") return Algorithm::Random;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected spaql|aql|random)");
}

void ExperimentSpec::validate() const {
  if (n_agents < 1) throw std::invalid_argument("experiment: agents must be >= 1");
  if (env.horizon != train.horizon) {
    throw std::invalid_argument("experiment: environment and training horizon differ");
  }
  train.validate();
}

std::vector<double> ExperimentResult::final_rewards() const {
  return final_values(logs, &TrainingLog::reward);
}

std::vector<double> ExperimentResult::final_arms() const {
  return final_values(logs, &TrainingLog::arms);
}

TrainingLog random_train(const Environment& env, const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed, kEvalStream);
  TrainingLog log;
  for (int k = 0; k <= cfg.episodes; ++k) {
    double sum = 0.0;
    for (int i = 0; i < cfg.eval_rollouts; ++i) sum += random_rollout(env, rng);
    const double perf = sum / static_cast<double>(cfg.eval_rollouts);
    log.reward.push_back(perf);
    log.arms.push_back(0);
    log.working_reward.push_back(perf);
    log.working_arms.push_back(0);
    log.temperature.push_back(0.0);
  }
  return log;
}

TrainingLog train_agent(const ExperimentSpec& spec, int agent_index) {
  const auto env = make_environment(spec.env);
  TrainConfig cfg = spec.train;
  cfg.seed = spec.base_seed + static_cast<std::uint64_t>(agent_index);
  switch (spec.algorithm) {
    case Algorithm::Spaql: return train(*env, cfg);
    case Algorithm::Aql: return aql_train(*env, cfg);
    case Algorithm::Random: return random_train(*env, cfg);
  }
  throw std::logic_error("train_agent: unhandled algorithm");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  result.logs.resize(static_cast<std::size_t>(spec.n_agents));
  parallel_for(result.logs.size(), spec.threads, [&](std::size_t i) {
    result.logs[i] = train_agent(spec, static_cast<int>(i));
  });
  summarize(result);
  if (!spec.output_dir.empty()) export_results({&result}, spec.output_dir);
  return result;
}

const std::vector<double>& default_xi_values() {
  static const std::vector<double> values{0.01, 0.1, 0.25, 0.5, 0.75, 1.0, 1.25,
                                          1.5,  1.75, 2.0, 3.0, 4.0,  5.0};
  return values;
}

SweepResult scaling_sweep(const ExperimentSpec& spec, const std::vector<double>& xi_values,
                          bool keep_runs) {
  if (xi_values.empty()) throw std::invalid_argument("scaling_sweep: empty xi list");
  spec.validate();
  const bool persist = !spec.output_dir.empty();
  // Logs are needed for export even when the caller does not want them back.
  const bool keep_logs = keep_runs || persist;

  const std::size_t agents = static_cast<std::size_t>(spec.n_agents);
  std::vector<ExperimentResult> runs(xi_values.size());
  for (std::size_t j = 0; j < xi_values.size(); ++j) {
    runs[j].spec = spec;
    runs[j].spec.train.scaling = xi_values[j];
    runs[j].spec.train.validate();
    if (persist) runs[j].spec.output_dir = spec.output_dir / ("xi_" + format_real(xi_values[j]));
    runs[j].logs.resize(agents);
  }
  std::vector<double> final_reward(xi_values.size() * agents);
  std::vector<double> final_arms(xi_values.size() * agents);

  parallel_for(xi_values.size() * agents, spec.threads, [&](std::size_t job) {
    const std::size_t j = job / agents;
    const std::size_t i = job % agents;
    TrainingLog log = train_agent(runs[j].spec, static_cast<int>(i));
    final_reward[job] = log.final_reward();
    final_arms[job] = static_cast<double>(log.final_arms());
    if (keep_logs) runs[j].logs[i] = std::move(log);
  });

  SweepResult sweep;
  sweep.algorithm = spec.algorithm;
  sweep.xi = xi_values;
  std::vector<double> means;
  for (std::size_t j = 0; j < xi_values.size(); ++j) {
    const std::span<const double> r(final_reward.data() + j * agents, agents);
    const std::span<const double> a(final_arms.data() + j * agents, agents);
    runs[j].reward = aggregate(r);
    runs[j].arms = aggregate(a);
    sweep.reward.push_back(runs[j].reward);
    sweep.arms.push_back(runs[j].arms);
    means.push_back(runs[j].reward.mean);
    if (means.back() > means[sweep.best_index]) sweep.best_index = j;
  }
  sweep.across_xi_mean = sample_mean(means);
  sweep.across_xi_std = std::sqrt(sample_variance(means));

  if (persist) {
    std::filesystem::create_directories(spec.output_dir);
    for (const auto& run : runs) export_results({&run}, run.spec.output_dir);
    const auto path = spec.output_dir / "sweep.csv";
    auto os = open_output(path);
    os << "algorithm,xi,mean_reward,std_reward,ci95_reward,mean_arms,std_arms,ci95_arms\n";
    for (std::size_t j = 0; j < xi_values.size(); ++j) {
      os << to_string(spec.algorithm) << ',' << format_real(xi_values[j]) << ','
         << format_real(sweep.reward[j].mean) << ',' << format_real(sweep.reward[j].std) << ','
         << format_real(sweep.reward[j].ci95_half_width) << ',' << format_real(sweep.arms[j].mean)
         << ',' << format_real(sweep.arms[j].std) << ','
         << format_real(sweep.arms[j].ci95_half_width) << '\n';
    }
    check_written(os, path);
  }
  if (keep_runs) sweep.runs = std::move(runs);
  return sweep;
}

double theoretical_xi(int horizon, int episodes, double delta, double lipschitz, double d_max) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("theoretical_xi: delta must lie in (0,1]");
  }
  const double h = static_cast<double>(horizon);
  return 2.0 * std::sqrt(h * h * h * std::log(4.0 * h * episodes / delta)) +
         4.0 * lipschitz * d_max;
}

LongHorizonReport long_horizon_scenario(ExperimentSpec spec) {
  spec.env.kind = EnvKind::Oil;
  spec.env.survey = SurveyKind::Laplace;
  spec.env.lambda = 1.0;
  spec.env.horizon = 50;
  spec.train.horizon = 50;
  spec.n_agents = 2;
  const auto out = spec.output_dir;
  spec.output_dir.clear();

  LongHorizonReport report;
  spec.algorithm = Algorithm::Spaql;
  report.spaql = run_experiment(spec);
  spec.algorithm = Algorithm::Aql;
  report.aql = run_experiment(spec);

  for (const auto& log : report.spaql.logs) {
    const double target = 0.95 * log.final_reward();
    int first = 0;
    while (log.reward[static_cast<std::size_t>(first)] < target) ++first;
    report.spaql_iteration_to_95.push_back(first);
  }
  report.spaql_mean_arms = report.spaql.arms.mean;
  report.aql_mean_arms = report.aql.arms.mean;
  report.max_reward = max_reward_bound(50, kOilDeposit);

  if (!out.empty()) export_results({&report.spaql, &report.aql}, out);
  return report;
}

CompareReport compare(const ExperimentSpec& spec, const std::vector<double>& xi_values) {
  ExperimentSpec base = spec;
  base.output_dir.clear();
  CompareReport report;

  base.algorithm = Algorithm::Spaql;
  report.spaql = scaling_sweep(base, xi_values, true);
  report.spaql_best = std::move(report.spaql.runs[report.spaql.best_index]);
  report.spaql.runs.clear();

  base.algorithm = Algorithm::Aql;
  report.aql = scaling_sweep(base, xi_values, true);
  report.aql_best = std::move(report.aql.runs[report.aql.best_index]);
  report.aql.runs.clear();

  base.algorithm = Algorithm::Random;
  report.random = run_experiment(base);

  std::vector<NamedTest> tests;
  try {
    report.spaql_vs_aql =
        welch_t_test(report.spaql_best.final_rewards(), report.aql_best.final_rewards());
    tests.push_back({"spaql_vs_aql", *report.spaql_vs_aql});
  } catch (const std::invalid_argument&) {
    // Degenerate samples (e.g. a single agent): no test.
  }
  if (!spec.output_dir.empty()) {
    export_results({&report.spaql_best, &report.aql_best, &report.random}, spec.output_dir, tests);
  }
  return report;
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void export_results(const std::vector<const ExperimentResult*>& results,
                    const std::filesystem::path& dir, const std::vector<NamedTest>& tests) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  std::map<Algorithm, int> counts;
  for (const auto* r : results) ++counts[r->spec.algorithm];
  auto label = [&](const ExperimentResult& r) {
    std::string s = to_string(r.spec.algorithm);
    if (counts[r.spec.algorithm] > 1) s += "_xi" + format_real(r.spec.train.scaling);
    return s;
  };

  {
    const auto path = dir / "curves.csv";
    auto os = open_output(path);
    os << "algorithm,xi,iteration,mean_reward,ci95,mean_arms\n";
    for (const auto* r : results) {
      const std::size_t iters = r->logs.front().iterations();
      std::vector<double> rewards(r->logs.size());
      std::vector<double> arms(r->logs.size());
      for (std::size_t k = 0; k < iters; ++k) {
        for (std::size_t i = 0; i < r->logs.size(); ++i) {
          rewards[i] = r->logs[i].reward[k];
          arms[i] = static_cast<double>(r->logs[i].arms[k]);
        }
        const auto ra = aggregate(rewards);
        os << label(*r) << ',' << format_real(r->spec.train.scaling) << ',' << k << ','
           << format_real(ra.mean) << ',' << format_real(ra.ci95_half_width) << ','
           << format_real(sample_mean(arms)) << '\n';
      }
    }
    check_written(os, path);
  }

  {
    nlohmann::json summary;
    summary["experiments"] = nlohmann::json::array();
    for (const auto* r : results) {
      nlohmann::json e = to_json(r->spec);
      e["label"] = label(*r);
      e["reward"] = to_json(r->reward);
      e["arms"] = to_json(r->arms);
      e["final_rewards"] = rounded(r->final_rewards());
      e["final_arms"] = r->final_arms();
      summary["experiments"].push_back(e);
    }
    summary["tests"] = nlohmann::json::array();
    for (const auto& t : tests) {
      summary["tests"].push_back({{"name", t.name},
                                  {"t", round12(t.result.t)},
                                  {"p", round12(t.result.p)},
                                  {"df", round12(t.result.df)},
                                  {"significant_at_0.05", t.result.p < 0.05}});
    }
    const auto path = dir / "summary.json";
    auto os = open_output(path);
    os << summary.dump(2) << '\n';
    check_written(os, path);
  }

  for (const auto* r : results) {
    for (std::size_t i = 0; i < r->logs.size(); ++i) {
      const auto& parts = r->logs[i].partitions;
      for (std::size_t h = 0; h < parts.size(); ++h) {
        std::string name = "partition_" + label(*r) + "_" + std::to_string(i);
        if (parts.size() > 1) name += "_h" + std::to_string(h + 1);
        const auto path = dir / (name + ".csv");
        auto os = open_output(path);
        write_geometry_csv(os, parts[h].export_geometry());
        check_written(os, path);
      }
    }
  }
}

ConfigMap parse_config(const std::string& text) {
  ConfigMap cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a real number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("not a real number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

void apply_config(const ConfigMap& cfg, ExperimentSpec& spec) {
  auto to_real = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw std::invalid_argument("config '" + key + "': not a real number: '" + v + "'");
    }
  };
  auto to_int = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const long long n = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return n;
    } catch (const std::exception&) {
      throw std::invalid_argument("config '" + key + "': not an integer: '" + v + "'");
    }
  };
  for (const auto& [key, value] : cfg) {
    if (key == "env") spec.env.kind = parse_env_kind(value);
    else if (key == "survey") spec.env.survey = parse_survey_kind(value);
    else if (key == "lambda") spec.env.lambda = to_real(key, value);
    else if (key == "arrivals") spec.env.arrivals = parse_arrival_kind(value);
    else if (key == "cost_weight") spec.env.cost_weight = to_real(key, value);
    else if (key == "horizon") spec.env.horizon = spec.train.horizon = static_cast<int>(to_int(key, value));
    else if (key == "algorithm") spec.algorithm = parse_algorithm(value);
    else if (key == "xi") spec.train.scaling = parse_real_list(value).front();
    else if (key == "episodes") spec.train.episodes = static_cast<int>(to_int(key, value));
    else if (key == "rollouts") spec.train.eval_rollouts = static_cast<int>(to_int(key, value));
    else if (key == "agents") spec.n_agents = static_cast<int>(to_int(key, value));
    else if (key == "seed") spec.base_seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "out") spec.output_dir = value;
    else if (key == "tau_min") spec.train.tau_min = to_real(key, value);
    else if (key == "tau_max") spec.train.tau_max = to_real(key, value);
    else if (key == "u") spec.train.u0 = to_real(key, value);
    else if (key == "d") spec.train.d = to_real(key, value);
    else if (key == "reset_splits") spec.train.reset_splits = static_cast<int>(to_int(key, value));
    else if (key == "train_action") spec.train.train_action = parse_action_rule(value);
    else if (key == "eval_action") spec.train.eval_action = parse_action_rule(value);
    else if (key == "threads") spec.threads = static_cast<unsigned>(to_int(key, value));
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

}  // namespace spaql
