#include "spaql/aql.hpp"

#include <stdexcept>

namespace spaql {

AqlAgent::AqlAgent(int horizon) {
  if (horizon < 1) throw std::invalid_argument("aql: horizon must be >= 1");
  partitions.assign(static_cast<std::size_t>(horizon),
                    PartitionTree(static_cast<double>(horizon), 1.0));
}

std::int64_t AqlAgent::num_arms() const {
  std::int64_t total = 0;
  for (const auto& p : partitions) total += p.num_arms();
  return total;
}

int aql_train_episode(AqlAgent& agent, const Environment& env, double scaling, Rng& rng,
                      ActionRule rule) {
  const int horizon = agent.horizon();
  int splits = 0;
  double state = env.reset(rng);
  for (int h = 0; h < horizon; ++h) {
    PartitionTree& tree = agent.partitions[static_cast<std::size_t>(h)];
    const BallId selected = tree.select_greedy(state);
    const Transition t = env.step(state, choose_action(tree.ball(selected), rule, rng), rng);

    const double next_value =
        h + 1 < horizon
            ? agent.partitions[static_cast<std::size_t>(h) + 1].value_estimate(t.next_state,
                                                                                 horizon)
            : 0.0;
    Ball& ball = tree.ball(selected);
    const std::int64_t visits = ++ball.visit_count;
    q_update(ball, t.reward, next_value, learning_rate(visits, horizon), bonus(scaling, visits));
    if (tree.should_split(selected)) {
      tree.split(selected);
      ++splits;
    }
    state = t.next_state;
  }
  return splits;
}

double aql_rollout(const AqlAgent& agent, const Environment& env, Rng& rng, ActionRule rule) {
  double state = env.reset(rng);
  double total = 0.0;
  for (const PartitionTree& tree : agent.partitions) {
    const Transition t =
        env.step(state, choose_action(tree.ball(tree.select_greedy(state)), rule, rng), rng);
    total += t.reward;
    state = t.next_state;
  }
  return total;
}

double aql_evaluate(const AqlAgent& agent, const Environment& env, int rollouts, Rng& rng,
                    ActionRule rule) {
  if (rollouts < 1) throw std::invalid_argument("aql_evaluate: need at least one rollout");
  if (env.deterministic() && rule == ActionRule::Center) return aql_rollout(agent, env, rng);
  double sum = 0.0;
  for (int i = 0; i < rollouts; ++i) sum += aql_rollout(agent, env, rng, rule);
  return sum / static_cast<double>(rollouts);
}

TrainingLog aql_train(const Environment& env, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.horizon != env.horizon()) {
    throw std::invalid_argument("aql_train: config horizon differs from environment horizon");
  }
  Rng train_rng(cfg.seed, kTrainStream);
  Rng eval_rng(cfg.seed, kEvalStream);
  AqlAgent agent(cfg.horizon);

  TrainingLog log;
  auto record = [&](double perf) {
    log.reward.push_back(perf);
    log.arms.push_back(agent.num_arms());
    log.working_reward.push_back(perf);
    log.working_arms.push_back(agent.num_arms());
    log.temperature.push_back(0.0);
  };

  record(aql_evaluate(agent, env, cfg.eval_rollouts, eval_rng, cfg.eval_action));
  for (int k = 0; k < cfg.episodes; ++k) {
    aql_train_episode(agent, env, cfg.scaling, train_rng, cfg.train_action);
    record(aql_evaluate(agent, env, cfg.eval_rollouts, eval_rng, cfg.eval_action));
  }
  log.partitions = std::move(agent.partitions);
  return log;
}

}  // namespace spaql
