// spaql: command-line driver for SPAQL / AQL experiments.
//
//   spaql run            --env oil --survey quadratic --lambda 50 --xi 0.5 --agents 25
//   spaql sweep          --env ambulance --arrivals uniform --cost-weight 0 --algorithm aql
//   spaql compare        --config oil_quadratic_50.cfg --out results/
//   spaql long-horizon   --episodes 5000 --xi 1
//   spaql export-partition --env oil --xi 0.5 --seed 3 --out partition.csv
//
// Settings are read from an optional flat key=value file (--config) and then
// overridden by flags.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "spaql/aql.hpp"
#include "spaql/harness.hpp"

namespace {

using spaql::format_real;

struct Options {
  std::string config_path;
  spaql::ConfigMap overrides;
};

void add_common_options(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config_path, "flat key=value config file");
  auto str = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.overrides[key] = v; }, help);
  };
  str("--env", "env", "oil|ambulance");
  str("--survey", "survey", "laplace|quadratic (oil)");
  str("--lambda", "lambda", "survey sharpness (oil)");
  str("--arrivals", "arrivals", "uniform|beta (ambulance)");
  str("--cost-weight", "cost_weight", "relocation cost weight c in [0,1] (ambulance)");
  str("--xi", "xi", "UCB scaling; comma separated list for sweep/compare");
  str("--episodes", "episodes", "training iterations K");
  str("--horizon", "horizon", "episode length H");
  str("--rollouts", "rollouts", "evaluation rollouts N");
  str("--agents", "agents", "number of agents");
  str("--seed", "seed", "base seed; agent i uses seed + i");
  str("--out", "out", "output directory (file for export-partition)");
  str("--algorithm", "algorithm", "spaql|aql|random");
  str("--train-action", "train_action", "center|uniform action inside the selected ball");
  str("--eval-action", "eval_action", "center|uniform action during evaluation rollouts");
  str("--threads", "threads", "worker threads (0 = all cores)");
  str("--u", "u", "temperature heat factor");
  str("--d", "d", "heat factor decay");
  str("--reset-splits", "reset_splits", "splits without improvement before reset");
}

struct Resolved {
  spaql::ExperimentSpec spec;
  std::vector<double> xi_values;
};

Resolved resolve(const Options& opts, bool sweep_default) {
  spaql::ConfigMap cfg;
  if (!opts.config_path.empty()) cfg = spaql::read_config_file(opts.config_path);
  for (const auto& [k, v] : opts.overrides) cfg[k] = v;
  Resolved r;
  spaql::apply_config(cfg, r.spec);
  if (auto it = cfg.find("xi"); it != cfg.end()) {
    r.xi_values = spaql::parse_real_list(it->second);
  } else if (sweep_default) {
    r.xi_values = spaql::default_xi_values();
  } else {
    r.xi_values = {r.spec.train.scaling};
  }
  return r;
}

void print_aggregate(const char* label, const spaql::ExperimentResult& r) {
  std::printf("%-8s xi=%-6s reward %.4f +- %.4f   arms %.2f +- %.2f   (n=%d)\n", label,
              format_real(r.spec.train.scaling).c_str(), r.reward.mean, r.reward.ci95_half_width,
              r.arms.mean, r.arms.ci95_half_width, r.reward.n);
}

void print_sweep(const spaql::SweepResult& s) {
  std::printf("%s sweep\n%8s %10s %10s %10s %10s\n", spaql::to_string(s.algorithm).c_str(), "xi",
              "reward", "ci95", "arms", "ci95");
  for (std::size_t j = 0; j < s.xi.size(); ++j) {
    std::printf("%8s %10.4f %10.4f %10.2f %10.2f%s\n", format_real(s.xi[j]).c_str(),
                s.reward[j].mean, s.reward[j].ci95_half_width, s.arms[j].mean,
                s.arms[j].ci95_half_width, j == s.best_index ? "  *" : "");
  }
  std::printf("across-xi mean %.4f  std %.4f\n", s.across_xi_mean, s.across_xi_std);
}

int cmd_run(const Options& opts) {
  auto r = resolve(opts, false);
  if (r.xi_values.size() != 1) throw std::invalid_argument("run: --xi takes a single value");
  r.spec.train.scaling = r.xi_values.front();
  const auto result = spaql::run_experiment(r.spec);
  print_aggregate(spaql::to_string(r.spec.algorithm).c_str(), result);
  return 0;
}

int cmd_sweep(const Options& opts) {
  const auto r = resolve(opts, true);
  print_sweep(spaql::scaling_sweep(r.spec, r.xi_values, false));
  return 0;
}

int cmd_compare(const Options& opts) {
  const auto r = resolve(opts, true);
  const auto report = spaql::compare(r.spec, r.xi_values);
  print_sweep(report.spaql);
  print_sweep(report.aql);
  std::printf("\n");
  print_aggregate("random", report.random);
  print_aggregate("aql", report.aql_best);
  print_aggregate("spaql", report.spaql_best);
  if (report.spaql_vs_aql) {
    const auto& w = *report.spaql_vs_aql;
    std::printf("welch spaql vs aql: t=%.4f df=%.2f p=%.4g -> %s\n", w.t, w.df, w.p,
                w.p < 0.05 ? "different at alpha=0.05" : "no significant difference");
  }
  return 0;
}

int cmd_long_horizon(const Options& opts) {
  auto r = resolve(opts, false);
  r.spec.train.scaling = r.xi_values.front();
  if (!opts.overrides.contains("episodes") && opts.config_path.empty()) {
    r.spec.train.episodes = 5000;
  }
  const auto report = spaql::long_horizon_scenario(r.spec);
  print_aggregate("spaql", report.spaql);
  print_aggregate("aql", report.aql);
  for (std::size_t i = 0; i < report.spaql_iteration_to_95.size(); ++i) {
    std::printf("spaql agent %zu reaches 95%% of final reward at iteration %d\n", i,
                report.spaql_iteration_to_95[i]);
  }
  std::printf("arms: aql %.1f / spaql %.1f = %.2fx; max attainable reward %.4f\n",
              report.aql_mean_arms, report.spaql_mean_arms,
              report.aql_mean_arms / report.spaql_mean_arms, report.max_reward);
  return 0;
}

int cmd_export_partition(const Options& opts) {
  auto r = resolve(opts, false);
  r.spec.train.scaling = r.xi_values.front();
  const auto out = r.spec.output_dir;
  r.spec.output_dir.clear();
  if (r.spec.algorithm == spaql::Algorithm::Random) {
    throw std::invalid_argument("export-partition: random agents have no partition");
  }
  const auto log = spaql::train_agent(r.spec, 0);
  if (out.empty()) {
    for (const auto& p : log.partitions) spaql::write_geometry_csv(std::cout, p.export_geometry());
    return 0;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open '" + out.string() + "' for writing");
  for (const auto& p : log.partitions) spaql::write_geometry_csv(os, p.export_geometry());
  std::printf("wrote %lld leaves to %s\n", static_cast<long long>(log.final_arms()),
              out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-partition adaptive Q-learning experiments"};
  app.require_subcommand(1);

  Options run_opts, sweep_opts, compare_opts, long_opts, export_opts;
  auto* run = app.add_subcommand("run", "train n agents with one configuration");
  auto* sweep = app.add_subcommand("sweep", "sweep the UCB scaling parameter");
  auto* cmp = app.add_subcommand("compare", "SPAQL vs AQL vs random on one instance");
  auto* lh = app.add_subcommand("long-horizon", "oil/Laplace/lambda=1 with H=50");
  auto* ex = app.add_subcommand("export-partition", "train one agent and write its partition");
  add_common_options(run, run_opts);
  add_common_options(sweep, sweep_opts);
  add_common_options(cmp, compare_opts);
  add_common_options(lh, long_opts);
  add_common_options(ex, export_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*cmp) return cmd_compare(compare_opts);
    if (*lh) return cmd_long_horizon(long_opts);
    if (*ex) return cmd_export_partition(export_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
