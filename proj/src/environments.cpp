#include "spaql/environments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spaql {

Environment::Environment(int horizon) : horizon_(horizon) {
  if (horizon < 1) throw std::invalid_argument("environment horizon must be >= 1");
}

double laplace_survey(double action, const OilConfig& cfg) {
  return std::exp(-cfg.lambda * std::abs(action - cfg.deposit));
}

double quadratic_survey(double action, const OilConfig& cfg) {
  const double d = action - cfg.deposit;
  return 1.0 - cfg.lambda * d * d;
}

double survey(double action, const OilConfig& cfg) {
  return cfg.survey_kind == SurveyKind::Laplace ? laplace_survey(action, cfg)
                                                : quadratic_survey(action, cfg);
}

Transition oil_step(double state, double action, const OilConfig& cfg) {
  const double reward = std::max(0.0, survey(action, cfg) - std::abs(state - action));
  return {action, reward};
}

double oil_reset(const OilConfig&) { return 0.0; }

// Beta(5,2) is the distribution of the 5th order statistic of 6 uniforms,
// i.e. the second largest.
double sample_beta_5_2(Rng& rng) {
  double largest = 0.0;
  double second = 0.0;
  for (int i = 0; i < 6; ++i) {
    double u = rng.uniform();
    // Keep the support open at 0 so the variate lies in (0,1).
    while (u == 0.0) u = rng.uniform();
    if (u > largest) {
      second = largest;
      largest = u;
    } else if (u > second) {
      second = u;
    }
  }
  return second;
}

double sample_arrival(ArrivalKind kind, Rng& rng) {
  return kind == ArrivalKind::Beta ? sample_beta_5_2(rng) : rng.uniform();
}

double arrival_mean(ArrivalKind kind) {
  return kind == ArrivalKind::Beta ? 5.0 / 7.0 : 0.5;
}

double ambulance_reward(double state, double action, double next_state, double cost_weight) {
  return 1.0 - (cost_weight * std::abs(state - action) +
                (1.0 - cost_weight) * std::abs(next_state - action));
}

Transition ambulance_step(double state, double action, const AmbulanceConfig& cfg, Rng& rng) {
  const double next = sample_arrival(cfg.arrival_kind, rng);
  return {next, ambulance_reward(state, action, next, cfg.cost_weight)};
}

double ambulance_reset(const AmbulanceConfig& cfg, Rng& rng) {
  return sample_arrival(cfg.arrival_kind, rng);
}

OilEnvironment::OilEnvironment(OilConfig cfg, int horizon) : Environment(horizon), cfg_(cfg) {
  if (!(cfg_.lambda > 0.0)) throw std::invalid_argument("oil: lambda must be > 0");
  if (!(cfg_.deposit > 0.0 && cfg_.deposit < 1.0)) {
    throw std::invalid_argument("oil: deposit must lie in (0,1)");
  }
}

std::string OilEnvironment::describe() const {
  std::ostringstream os;
  os << "oil/" << to_string(cfg_.survey_kind) << "/lambda=" << cfg_.lambda
     << "/H=" << horizon();
  return os.str();
}

AmbulanceEnvironment::AmbulanceEnvironment(AmbulanceConfig cfg, int horizon)
    : Environment(horizon), cfg_(cfg) {
  if (!(cfg_.cost_weight >= 0.0 && cfg_.cost_weight <= 1.0)) {
    throw std::invalid_argument("ambulance: cost_weight must lie in [0,1]");
  }
}

std::string AmbulanceEnvironment::describe() const {
  std::ostringstream os;
  os << "ambulance/" << to_string(cfg_.arrival_kind) << "/c=" << cfg_.cost_weight
     << "/H=" << horizon();
  return os.str();
}

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg) {
  if (cfg.kind == EnvKind::Oil) {
    return std::make_unique<OilEnvironment>(OilConfig{cfg.survey, cfg.lambda, kOilDeposit},
                                            cfg.horizon);
  }
  return std::make_unique<AmbulanceEnvironment>(AmbulanceConfig{cfg.arrivals, cfg.cost_weight},
                                                cfg.horizon);
}

double heuristic_rollout(Heuristic kind, const Environment& env, Rng& rng) {
  const auto* amb = dynamic_cast<const AmbulanceEnvironment*>(&env);
  if (amb == nullptr) {
    throw std::invalid_argument("heuristic_rollout: requires an ambulance environment");
  }
  const double mean = arrival_mean(amb->config().arrival_kind);
  double state = env.reset(rng);
  double total = 0.0;
  for (int h = 0; h < env.horizon(); ++h) {
    const double action = kind == Heuristic::NoMovement ? state : mean;
    const Transition t = env.step(state, action, rng);
    total += t.reward;
    state = t.next_state;
  }
  return total;
}

double random_rollout(const Environment& env, Rng& rng) {
  double state = env.reset(rng);
  double total = 0.0;
  for (int h = 0; h < env.horizon(); ++h) {
    const Transition t = env.step(state, rng.uniform(), rng);
    total += t.reward;
    state = t.next_state;
  }
  return total;
}

double max_reward_bound(int horizon, double deposit) {
  return static_cast<double>(horizon) - deposit;
}

std::string to_string(EnvKind kind) { return kind == EnvKind::Oil ? "oil" : "ambulance"; }

std::string to_string(SurveyKind kind) {
  return kind == SurveyKind::Laplace ? "laplace" : "quadratic";
}

std::string to_string(ArrivalKind kind) {
  return kind == ArrivalKind::Uniform ? "uniform" : "beta";
}

EnvKind parse_env_kind(const std::string& s) {
  if (s == "oil") return EnvKind::Oil;
  if (s == "ambulance") return EnvKind::Ambulance;
  throw std::invalid_argument("unknown env '" + s + "' (expected oil|ambulance)");
}

SurveyKind parse_survey_kind(const std::string& s) {
  if (s == "laplace") return SurveyKind::Laplace;
  if (s == "quadratic") return SurveyKind::Quadratic;
  throw std::invalid_argument("unknown survey '" + s + "' (expected laplace|quadratic)");
}

ArrivalKind parse_arrival_kind(const std::string& s) {
  if (s == "uniform") return ArrivalKind::Uniform;
  if (s == "beta") return ArrivalKind::Beta;
  throw std::invalid_argument("unknown arrivals '" + s + "' (expected uniform|beta)");
}

}  // namespace spaql
