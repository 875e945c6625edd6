#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spaql/aql.hpp"
#include "spaql/harness.hpp"

namespace py = pybind11;
using namespace spaql;

namespace {

py::list geometry(const PartitionTree& tree) {
  py::list out;
  for (const auto& r : tree.export_geometry()) {
    out.append(py::make_tuple(r.center_state, r.center_action, r.radius, r.q_estimate,
                              r.visit_count));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Single-partition adaptive Q-learning and the adaptive Q-learning baseline";

  py::enum_<EnvKind>(m, "EnvKind").value("Oil", EnvKind::Oil).value("Ambulance", EnvKind::Ambulance);
  py::enum_<SurveyKind>(m, "SurveyKind")
      .value("Laplace", SurveyKind::Laplace)
      .value("Quadratic", SurveyKind::Quadratic);
  py::enum_<ArrivalKind>(m, "ArrivalKind")
      .value("Uniform", ArrivalKind::Uniform)
      .value("Beta", ArrivalKind::Beta);
  py::enum_<ActionRule>(m, "ActionRule")
      .value("Center", ActionRule::Center)
      .value("Uniform", ActionRule::Uniform);
  py::enum_<Algorithm>(m, "Algorithm")
      .value("Spaql", Algorithm::Spaql)
      .value("Aql", Algorithm::Aql)
      .value("Random", Algorithm::Random);

  m.attr("OIL_DEPOSIT") = kOilDeposit;

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
      .def("uniform", &Rng::uniform);

  // Partition.
  py::class_<Ball>(m, "Ball")
      .def_readonly("center_state", &Ball::center_state)
      .def_readonly("center_action", &Ball::center_action)
      .def_readonly("radius", &Ball::radius)
      .def_readwrite("q_estimate", &Ball::q_estimate)
      .def_readwrite("visit_count", &Ball::visit_count)
      .def_readonly("depth", &Ball::depth)
      .def("is_leaf", &Ball::is_leaf);

  py::class_<PartitionTree>(m, "PartitionTree")
      .def(py::init<double, double>(), py::arg("initial_q"), py::arg("d_max") = 1.0)
      .def_property_readonly("num_arms", &PartitionTree::num_arms)
      .def_property_readonly("split_count", &PartitionTree::split_count)
      .def_property_readonly("d_max", &PartitionTree::d_max)
      .def("ball", py::overload_cast<BallId>(&PartitionTree::ball, py::const_),
           py::return_value_policy::copy)
      .def("set_q", [](PartitionTree& t, BallId id, double q) { t.ball(id).q_estimate = q; })
      .def("leaves", &PartitionTree::leaves)
      .def("relevant_balls",
           py::overload_cast<double>(&PartitionTree::relevant_balls, py::const_),
           py::arg("state"))
      .def("locate", [](const PartitionTree& t, double x, double a) { return t.locate({x, a}); })
      .def("select_greedy", &PartitionTree::select_greedy)
      .def("value_estimate", &PartitionTree::value_estimate, py::arg("state"),
           py::arg("horizon"))
      .def("split", &PartitionTree::split)
      .def("export_geometry", &geometry,
           "List of (center_state, center_action, radius, q, visits), one per leaf.")
      .def("__copy__", [](const PartitionTree& t) { return PartitionTree(t); })
      .def("__eq__", [](const PartitionTree& a, const PartitionTree& b) { return a == b; });
  m.def("new_partition", &new_partition, py::arg("initial_q"));

  // Environments.
  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init<>())
      .def_readwrite("kind", &EnvConfig::kind)
      .def_readwrite("survey", &EnvConfig::survey)
      .def_readwrite("lambda_", &EnvConfig::lambda)
      .def_readwrite("arrivals", &EnvConfig::arrivals)
      .def_readwrite("cost_weight", &EnvConfig::cost_weight)
      .def_readwrite("horizon", &EnvConfig::horizon);

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("horizon", &Environment::horizon)
      .def_property_readonly("deterministic", &Environment::deterministic)
      .def("reset", &Environment::reset)
      .def("step",
           [](const Environment& e, double x, double a, Rng& rng) {
             const auto t = e.step(x, a, rng);
             return py::make_tuple(t.next_state, t.reward);
           })
      .def("__repr__", &Environment::describe);
  m.def("make_environment", &make_environment);
  m.def("random_rollout", &random_rollout);
  m.def("sample_beta_5_2", &sample_beta_5_2);
  m.def("ambulance_reward", &ambulance_reward, py::arg("state"), py::arg("action"),
        py::arg("next_state"), py::arg("cost_weight"));
  m.def("max_reward_bound", &max_reward_bound);

  // Training.
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("episodes", &TrainConfig::episodes)
      .def_readwrite("horizon", &TrainConfig::horizon)
      .def_readwrite("eval_rollouts", &TrainConfig::eval_rollouts)
      .def_readwrite("scaling", &TrainConfig::scaling)
      .def_readwrite("tau_min", &TrainConfig::tau_min)
      .def_readwrite("tau_max", &TrainConfig::tau_max)
      .def_readwrite("u0", &TrainConfig::u0)
      .def_readwrite("d", &TrainConfig::d)
      .def_readwrite("reset_splits", &TrainConfig::reset_splits)
      .def_readwrite("train_action", &TrainConfig::train_action)
      .def_readwrite("eval_action", &TrainConfig::eval_action)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<TrainingLog>(m, "TrainingLog")
      .def_readonly("reward", &TrainingLog::reward)
      .def_readonly("arms", &TrainingLog::arms)
      .def_readonly("working_reward", &TrainingLog::working_reward)
      .def_readonly("working_arms", &TrainingLog::working_arms)
      .def_readonly("temperature", &TrainingLog::temperature)
      .def_readonly("partitions", &TrainingLog::partitions)
      .def_property_readonly("final_reward", &TrainingLog::final_reward)
      .def_property_readonly("final_arms", &TrainingLog::final_arms)
      .def("__eq__", [](const TrainingLog& a, const TrainingLog& b) { return a == b; });

  m.def("train", &train, py::arg("env"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("aql_train", &aql_train, py::arg("env"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("rollout", &rollout, py::arg("tree"), py::arg("env"), py::arg("horizon"), py::arg("rng"),
        py::arg("rule") = ActionRule::Center);
  m.def("boltzmann_probabilities",
        [](const std::vector<double>& q, double tau) { return boltzmann_probabilities(q, tau); });

  // Statistics.
  py::class_<AggregateResult>(m, "AggregateResult")
      .def_readonly("mean", &AggregateResult::mean)
      .def_readonly("std", &AggregateResult::std)
      .def_readonly("ci95_half_width", &AggregateResult::ci95_half_width)
      .def_readonly("n", &AggregateResult::n);
  py::class_<WelchResult>(m, "WelchResult")
      .def_readonly("t", &WelchResult::t)
      .def_readonly("p", &WelchResult::p)
      .def_readonly("df", &WelchResult::df);
  m.def("aggregate", [](const std::vector<double>& v) { return aggregate(v); });
  m.def("welch_t_test", [](const std::vector<double>& a, const std::vector<double>& b) {
    return welch_t_test(a, b);
  });
  m.def("theoretical_xi", &theoretical_xi, py::arg("horizon"), py::arg("episodes"),
        py::arg("delta"), py::arg("lipschitz") = 0.0, py::arg("d_max") = 1.0);

  // Experiments.
  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("algorithm", &ExperimentSpec::algorithm)
      .def_readwrite("env", &ExperimentSpec::env)
      .def_readwrite("train", &ExperimentSpec::train)
      .def_readwrite("n_agents", &ExperimentSpec::n_agents)
      .def_readwrite("base_seed", &ExperimentSpec::base_seed)
      .def_readwrite("output_dir", &ExperimentSpec::output_dir)
      .def_readwrite("threads", &ExperimentSpec::threads);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("spec", &ExperimentResult::spec)
      .def_readonly("logs", &ExperimentResult::logs)
      .def_readonly("reward", &ExperimentResult::reward)
      .def_readonly("arms", &ExperimentResult::arms)
      .def("final_rewards", &ExperimentResult::final_rewards)
      .def("final_arms", &ExperimentResult::final_arms);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("algorithm", &SweepResult::algorithm)
      .def_readonly("xi", &SweepResult::xi)
      .def_readonly("reward", &SweepResult::reward)
      .def_readonly("arms", &SweepResult::arms)
      .def_readonly("across_xi_mean", &SweepResult::across_xi_mean)
      .def_readonly("across_xi_std", &SweepResult::across_xi_std)
      .def_readonly("best_index", &SweepResult::best_index)
      .def_readonly("runs", &SweepResult::runs)
      .def_property_readonly("best_xi", &SweepResult::best_xi);

  py::class_<CompareReport>(m, "CompareReport")
      .def_readonly("spaql", &CompareReport::spaql)
      .def_readonly("aql", &CompareReport::aql)
      .def_readonly("spaql_best", &CompareReport::spaql_best)
      .def_readonly("aql_best", &CompareReport::aql_best)
      .def_readonly("random", &CompareReport::random)
      .def_readonly("spaql_vs_aql", &CompareReport::spaql_vs_aql);

  py::class_<LongHorizonReport>(m, "LongHorizonReport")
      .def_readonly("spaql", &LongHorizonReport::spaql)
      .def_readonly("aql", &LongHorizonReport::aql)
      .def_readonly("spaql_iteration_to_95", &LongHorizonReport::spaql_iteration_to_95)
      .def_readonly("spaql_mean_arms", &LongHorizonReport::spaql_mean_arms)
      .def_readonly("aql_mean_arms", &LongHorizonReport::aql_mean_arms)
      .def_readonly("max_reward", &LongHorizonReport::max_reward);

  m.def("default_xi_values", &default_xi_values);
  m.def("run_experiment", &run_experiment, py::call_guard<py::gil_scoped_release>());
  m.def("scaling_sweep", &scaling_sweep, py::arg("spec"), py::arg("xi_values"),
        py::arg("keep_runs") = true, py::call_guard<py::gil_scoped_release>());
  m.def("compare", &compare, py::arg("spec"), py::arg("xi_values"),
        py::call_guard<py::gil_scoped_release>());
  m.def("long_horizon_scenario", &long_horizon_scenario,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "export_results",
      [](const std::vector<ExperimentResult>& results, const std::filesystem::path& dir) {
        std::vector<const ExperimentResult*> ptrs;
        for (const auto& r : results) ptrs.push_back(&r);
        export_results(ptrs, dir);
      },
      py::arg("results"), py::arg("dir"));
}
