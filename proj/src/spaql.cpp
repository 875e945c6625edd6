#include "spaql/spaql.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spaql {

void TrainConfig::validate() const {
  if (episodes < 1 || horizon < 1 || eval_rollouts < 1) {
    throw std::invalid_argument("train config: episodes, horizon and rollouts must be >= 1");
  }
  if (!(scaling >= 0.0)) throw std::invalid_argument("train config: xi must be >= 0");
  if (!(tau_min > 0.0 && tau_min <= tau_max)) {
    throw std::invalid_argument("train config: need 0 < tau_min <= tau_max");
  }
  if (!(u0 > 1.0)) throw std::invalid_argument("train config: u must be > 1");
  if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("train config: d must lie in (0,1)");
  if (reset_splits < 1) throw std::invalid_argument("train config: reset_splits must be >= 1");
}

SpaqlAgent::SpaqlAgent(const TrainConfig& cfg)
    : best(static_cast<double>(cfg.horizon), 1.0),
      working(static_cast<double>(cfg.horizon), 1.0),
      temperature(cfg.tau_min),
      tau_min(cfg.tau_min),
      tau_max(cfg.tau_max),
      heat_factor(cfg.u0),
      heat_decay(cfg.d),
      best_performance(0.0),
      reset_splits(cfg.reset_splits) {}

double learning_rate(std::int64_t visits, int horizon) {
  return static_cast<double>(horizon + 1) / static_cast<double>(horizon + visits);
}

double bonus(double scaling, std::int64_t visits) {
  return scaling / std::sqrt(static_cast<double>(visits));
}

double choose_action(const Ball& ball, ActionRule rule, Rng& rng) {
  if (rule == ActionRule::Center) return ball.center_action;
  const double lo = std::max(0.0, ball.center_action - ball.radius);
  const double hi = std::min(1.0, ball.center_action + ball.radius);
  return lo + (hi - lo) * rng.uniform();
}

void q_update(Ball& ball, double reward, double next_value, double alpha, double bonus_term) {
  ball.q_estimate = (1.0 - alpha) * ball.q_estimate + alpha * (reward + next_value + bonus_term);
}

namespace {

// Unnormalized weights, shifted so the largest is exp(0) = 1. The shift does
// not change the distribution and keeps tiny temperatures finite.
void boltzmann_weights(std::span<const double> q, double tau, std::vector<double>& w) {
  double max_q = q[0];
  for (double v : q) max_q = std::max(max_q, v);
  const double scale = max_q > 0.0 ? 1.0 / max_q : 1.0;
  const double top = max_q * scale;
  w.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) w[i] = std::exp((q[i] * scale - top) / tau);
}

}  // namespace

std::vector<double> boltzmann_probabilities(std::span<const double> q_values, double tau) {
  if (q_values.empty()) throw std::invalid_argument("boltzmann: empty candidate list");
  if (!(tau > 0.0)) throw std::invalid_argument("boltzmann: tau must be > 0");
  std::vector<double> w;
  boltzmann_weights(q_values, tau, w);
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

BallId boltzmann_sample(const PartitionTree& tree, std::span<const BallId> balls, double tau,
                        Rng& rng) {
  thread_local std::vector<double> q;
  thread_local std::vector<double> w;
  q.clear();
  for (BallId id : balls) q.push_back(tree.ball(id).q_estimate);
  boltzmann_weights(q, tau, w);
  double total = 0.0;
  for (double v : w) total += v;
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    acc += w[i];
    if (target < acc) return balls[i];
  }
  // Rounding can leave target == total; fall back to the last positive weight.
  for (std::size_t i = balls.size(); i-- > 0;) {
    if (w[i] > 0.0) return balls[i];
  }
  return balls.back();
}

int train_episode(SpaqlAgent& agent, const Environment& env, const TrainConfig& cfg, Rng& rng) {
  PartitionTree& tree = agent.working;
  std::vector<BallId> relevant;
  int splits = 0;
  double state = env.reset(rng);
  for (int h = 0; h < cfg.horizon; ++h) {
    tree.relevant_balls(state, relevant);
    const BallId selected = boltzmann_sample(tree, relevant, agent.temperature, rng);
    const double action = choose_action(tree.ball(selected), cfg.train_action, rng);
    const Transition t = env.step(state, action, rng);

    const double next_value = tree.value_estimate(t.next_state, cfg.horizon);
    Ball& ball = tree.ball(selected);
    const std::int64_t visits = ++ball.visit_count;
    q_update(ball, t.reward, next_value, learning_rate(visits, cfg.horizon),
             bonus(cfg.scaling, visits));
    if (tree.should_split(selected)) {
      tree.split(selected);
      ++splits;
    }
    state = t.next_state;
  }
  return splits;
}

double rollout(const PartitionTree& tree, const Environment& env, int horizon, Rng& rng,
               ActionRule rule) {
  double state = env.reset(rng);
  double total = 0.0;
  for (int h = 0; h < horizon; ++h) {
    const double action = choose_action(tree.ball(tree.select_greedy(state)), rule, rng);
    const Transition t = env.step(state, action, rng);
    total += t.reward;
    state = t.next_state;
  }
  return total;
}

double evaluate_agent(const PartitionTree& tree, const Environment& env, int horizon,
                      int rollouts, Rng& rng, ActionRule rule) {
  if (rollouts < 1) throw std::invalid_argument("evaluate_agent: need at least one rollout");
  if (env.deterministic() && rule == ActionRule::Center) return rollout(tree, env, horizon, rng);
  double sum = 0.0;
  for (int i = 0; i < rollouts; ++i) sum += rollout(tree, env, horizon, rng, rule);
  return sum / static_cast<double>(rollouts);
}

void temperature_step(SpaqlAgent& agent, bool improved, int splits_this_episode) {
  if (improved) {
    agent.best = agent.working;
    agent.temperature = agent.tau_min;
    agent.heat_factor = std::pow(agent.heat_factor, agent.heat_decay);
    agent.splits_since_improvement = 0;
    return;
  }
  agent.temperature = std::min(agent.tau_max, agent.heat_factor * agent.temperature);
  agent.splits_since_improvement += splits_this_episode;
  if (agent.splits_since_improvement >= agent.reset_splits) {
    agent.working = agent.best;
    agent.temperature = agent.tau_min;
    agent.splits_since_improvement = 0;
  }
}

TrainingLog train(const Environment& env, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.horizon != env.horizon()) {
    throw std::invalid_argument("train: config horizon differs from environment horizon");
  }
  Rng train_rng(cfg.seed, kTrainStream);
  Rng eval_rng(cfg.seed, kEvalStream);
  SpaqlAgent agent(cfg);

  TrainingLog log;
  const auto n = static_cast<std::size_t>(cfg.episodes) + 1;
  log.reward.reserve(n);
  log.arms.reserve(n);
  log.working_reward.reserve(n);
  log.working_arms.reserve(n);
  log.temperature.reserve(n);

  auto record = [&](double working_perf) {
    log.reward.push_back(agent.best_performance);
    log.arms.push_back(agent.best.num_arms());
    log.working_reward.push_back(working_perf);
    log.working_arms.push_back(agent.working.num_arms());
    log.temperature.push_back(agent.temperature);
  };

  agent.best_performance =
      evaluate_agent(agent.best, env, cfg.horizon, cfg.eval_rollouts, eval_rng, cfg.eval_action);
  record(agent.best_performance);

  for (int k = 0; k < cfg.episodes; ++k) {
    const int splits = train_episode(agent, env, cfg, train_rng);
    const double perf =
        evaluate_agent(agent.working, env, cfg.horizon, cfg.eval_rollouts, eval_rng, cfg.eval_action);
    const bool improved = perf > agent.best_performance;
    if (improved) agent.best_performance = perf;
    temperature_step(agent, improved, splits);
    record(perf);
  }
  log.partitions.push_back(agent.best);
  return log;
}

}  // namespace spaql
