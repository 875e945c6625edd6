#ifndef SPAQL_ENVIRONMENTS_HPP
#define SPAQL_ENVIRONMENTS_HPP

#include <memory>
#include <numbers>
#include <string>

#include "spaql/rng.hpp"

namespace spaql {

/// Hidden oil deposit location.
inline constexpr double kOilDeposit = 0.7 + std::numbers::pi / 60.0;

enum class EnvKind { Oil, Ambulance };
enum class SurveyKind { Laplace, Quadratic };
enum class ArrivalKind { Uniform, Beta };

struct OilConfig {
  SurveyKind survey_kind = SurveyKind::Laplace;
  double lambda = 1.0;
  double deposit = kOilDeposit;
};

struct AmbulanceConfig {
  ArrivalKind arrival_kind = ArrivalKind::Uniform;
  double cost_weight = 0.0;
};

struct Transition {
  double next_state;
  double reward;
};

/// Episodic, time-invariant MDP on S = A = [0,1] with rewards in [0,1].
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvKind kind() const = 0;
  int horizon() const { return horizon_; }

  virtual double reset(Rng& rng) const = 0;
  virtual Transition step(double state, double action, Rng& rng) const = 0;

  /// True when reset and step never consume randomness.
  virtual bool deterministic() const = 0;

  virtual std::string describe() const = 0;

 protected:
  explicit Environment(int horizon);

 private:
  int horizon_;
};

double laplace_survey(double action, const OilConfig& cfg);
double quadratic_survey(double action, const OilConfig& cfg);
double survey(double action, const OilConfig& cfg);

Transition oil_step(double state, double action, const OilConfig& cfg);
double oil_reset(const OilConfig& cfg);

double sample_beta_5_2(Rng& rng);
double sample_arrival(ArrivalKind kind, Rng& rng);
double arrival_mean(ArrivalKind kind);

double ambulance_reward(double state, double action, double next_state, double cost_weight);
Transition ambulance_step(double state, double action, const AmbulanceConfig& cfg, Rng& rng);
double ambulance_reset(const AmbulanceConfig& cfg, Rng& rng);

class OilEnvironment final : public Environment {
 public:
  OilEnvironment(OilConfig cfg, int horizon);

  EnvKind kind() const override { return EnvKind::Oil; }
  double reset(Rng&) const override { return oil_reset(cfg_); }
  Transition step(double state, double action, Rng&) const override {
    return oil_step(state, action, cfg_);
  }
  bool deterministic() const override { return true; }
  std::string describe() const override;

  const OilConfig& config() const { return cfg_; }

 private:
  OilConfig cfg_;
};

class AmbulanceEnvironment final : public Environment {
 public:
  AmbulanceEnvironment(AmbulanceConfig cfg, int horizon);

  EnvKind kind() const override { return EnvKind::Ambulance; }
  double reset(Rng& rng) const override { return ambulance_reset(cfg_, rng); }
  Transition step(double state, double action, Rng& rng) const override {
    return ambulance_step(state, action, cfg_, rng);
  }
  bool deterministic() const override { return false; }
  std::string describe() const override;

  const AmbulanceConfig& config() const { return cfg_; }

 private:
  AmbulanceConfig cfg_;
};

/// Flat environment selection, mirroring the `env`, `survey`, `lambda`,
/// `arrivals`, `cost_weight` and `horizon` config keys.
struct EnvConfig {
  EnvKind kind = EnvKind::Oil;
  SurveyKind survey = SurveyKind::Laplace;
  double lambda = 1.0;
  ArrivalKind arrivals = ArrivalKind::Uniform;
  double cost_weight = 0.0;
  int horizon = 5;
};

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg);

enum class Heuristic { NoMovement, Mean };

/// One episode of an ambulance heuristic. Throws std::invalid_argument for oil.
double heuristic_rollout(Heuristic kind, const Environment& env, Rng& rng);

/// One episode with uniformly random actions.
double random_rollout(const Environment& env, Rng& rng);

/// Cumulative reward of moving to the deposit and staying there: H - c.
double max_reward_bound(int horizon, double deposit);

std::string to_string(EnvKind kind);
std::string to_string(SurveyKind kind);
std::string to_string(ArrivalKind kind);
EnvKind parse_env_kind(const std::string& s);
SurveyKind parse_survey_kind(const std::string& s);
ArrivalKind parse_arrival_kind(const std::string& s);

}  // namespace spaql

#endif  // SPAQL_ENVIRONMENTS_HPP
