#ifndef SPAQL_AQL_HPP
#define SPAQL_AQL_HPP

#include <vector>

#include "spaql/environments.hpp"
#include "spaql/partition.hpp"
#include "spaql/spaql.hpp"

namespace spaql {

/// Adaptive Q-learning with one partition per time step and greedy-UCB
/// selection. The value of the state after the last step is 0.
struct AqlAgent {
  explicit AqlAgent(int horizon);

  std::vector<PartitionTree> partitions;

  int horizon() const { return static_cast<int>(partitions.size()); }
  std::int64_t num_arms() const;
};

/// One greedy training episode; returns the number of splits.
int aql_train_episode(AqlAgent& agent, const Environment& env, double scaling, Rng& rng,
                      ActionRule rule = ActionRule::Center);

/// Greedy rollout through the per-step partitions.
double aql_rollout(const AqlAgent& agent, const Environment& env, Rng& rng,
                   ActionRule rule = ActionRule::Center);

double aql_evaluate(const AqlAgent& agent, const Environment& env, int rollouts, Rng& rng,
                    ActionRule rule = ActionRule::Center);

/// K episodes with an evaluation before training and after every episode.
/// The temperature fields of the SPAQL config are ignored.
TrainingLog aql_train(const Environment& env, const TrainConfig& cfg);

}  // namespace spaql

#endif  // SPAQL_AQL_HPP
