#ifndef SPAQL_SPAQL_HPP
#define SPAQL_SPAQL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "spaql/environments.hpp"
#include "spaql/partition.hpp"
#include "spaql/rng.hpp"

namespace spaql {

/// How an action is picked inside the selected ball's action interval.
enum class ActionRule { Center, Uniform };

struct TrainConfig {
  int episodes = 1000;     // K
  int horizon = 5;         // H
  int eval_rollouts = 20;  // N
  double scaling = 1.0;    // xi
  double tau_min = 0.01;
  double tau_max = 10.0;
  double u0 = 2.0;
  double d = 0.8;
  // Splits without improvement that trigger a reset of the working partition.
  int reset_splits = 2;
  // Uniform draws keep exploring inside a ball even when the environment is
  // deterministic; Center makes rollouts on the oil problem reproducible from
  // the partition alone.
  ActionRule train_action = ActionRule::Uniform;
  ActionRule eval_action = ActionRule::Uniform;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-iteration trace of one training run. Entry 0 is the evaluation taken
/// before the first episode, so every vector has episodes + 1 entries.
///
/// `reward` and `arms` describe the agent that training would return at that
/// point: the best partition for SPAQL, the current partitions for AQL.
/// `working_*` describe the partition being modified (identical for AQL).
struct TrainingLog {
  std::vector<double> reward;
  std::vector<std::int64_t> arms;
  std::vector<double> working_reward;
  std::vector<std::int64_t> working_arms;
  std::vector<double> temperature;
  // One tree for SPAQL (the best partition), H trees for AQL, none for random.
  std::vector<PartitionTree> partitions;

  std::size_t iterations() const { return reward.size(); }
  double final_reward() const { return reward.back(); }
  std::int64_t final_arms() const { return arms.back(); }

  friend bool operator==(const TrainingLog&, const TrainingLog&) = default;
};

class SpaqlAgent {
 public:
  explicit SpaqlAgent(const TrainConfig& cfg);

  PartitionTree best;
  PartitionTree working;
  double temperature;
  double tau_min;
  double tau_max;
  double heat_factor;
  double heat_decay;
  double best_performance;
  std::int64_t splits_since_improvement = 0;
  int reset_splits;
};

/// (H + 1) / (H + v).
double learning_rate(std::int64_t visits, int horizon);

/// xi / sqrt(v).
double bonus(double scaling, std::int64_t visits);

/// Q <- (1 - alpha) Q + alpha (r + V(x') + b). Expects the visit count to have
/// been incremented already.
void q_update(Ball& ball, double reward, double next_value, double alpha, double bonus_term);

/// Sampling distribution over `q_values`: values are divided by their maximum
/// when it is positive, then passed through a softmax at temperature `tau`.
std::vector<double> boltzmann_probabilities(std::span<const double> q_values, double tau);

/// Draws one of `balls` from the Boltzmann distribution over their Q values.
BallId boltzmann_sample(const PartitionTree& tree, std::span<const BallId> balls, double tau,
                        Rng& rng);

/// The action played for a selected ball: its action-coordinate center.
inline double action_from_ball(const Ball& ball) { return ball.center_action; }

/// Center, or a uniform draw from the ball's action interval clipped to [0,1].
double choose_action(const Ball& ball, ActionRule rule, Rng& rng);

/// Plays one H-step exploratory episode on the working partition and returns
/// the number of splits performed.
int train_episode(SpaqlAgent& agent, const Environment& env, const TrainConfig& cfg, Rng& rng);

/// Greedy episode; returns the cumulative reward.
double rollout(const PartitionTree& tree, const Environment& env, int horizon, Rng& rng,
               ActionRule rule = ActionRule::Center);

/// Mean of `rollouts` greedy episodes. Deterministic environments are played once.
double evaluate_agent(const PartitionTree& tree, const Environment& env, int horizon,
                      int rollouts, Rng& rng, ActionRule rule = ActionRule::Center);

/// Temperature schedule and agent reset after an evaluation.
void temperature_step(SpaqlAgent& agent, bool improved, int splits_this_episode);

/// Full SPAQL training run.
TrainingLog train(const Environment& env, const TrainConfig& cfg);

}  // namespace spaql

#endif  // SPAQL_SPAQL_HPP
