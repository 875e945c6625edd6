#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "spaql/environments.hpp"

using namespace spaql;

namespace {

// Regularized incomplete beta I_x(5,2) in closed form: 6x^5 - 5x^6.
double beta_5_2_cdf(double x) { return 6.0 * std::pow(x, 5) - 5.0 * std::pow(x, 6); }

}  // namespace

TEST_CASE("deposit location is kept at full precision") {
  CHECK(kOilDeposit == doctest::Approx(0.7523598775598298).epsilon(1e-15));
  CHECK(kOilDeposit != 0.75);
}

TEST_CASE("laplace survey") {
  OilConfig cfg{SurveyKind::Laplace, 50.0, kOilDeposit};
  CHECK(laplace_survey(kOilDeposit, cfg) == 1.0);
  CHECK(laplace_survey(kOilDeposit + 0.01, cfg) == doctest::Approx(std::exp(-0.5)));
  CHECK(laplace_survey(kOilDeposit - 0.01, cfg) == doctest::Approx(0.6065306597));
  cfg.lambda = 1.0;
  CHECK(laplace_survey(0.0, cfg) == doctest::Approx(0.47125313978902555).epsilon(1e-14));
}

TEST_CASE("quadratic survey may go negative") {
  OilConfig cfg{SurveyKind::Quadratic, 50.0, kOilDeposit};
  CHECK(quadratic_survey(kOilDeposit, cfg) == 1.0);
  CHECK(quadratic_survey(kOilDeposit + 0.01, cfg) == doctest::Approx(0.995));
  CHECK(quadratic_survey(0.0, cfg) == doctest::Approx(-27.302269268092104).epsilon(1e-13));
}

TEST_CASE("oil step") {
  OilConfig quad{SurveyKind::Quadratic, 1.0, kOilDeposit};
  auto t = oil_step(kOilDeposit, kOilDeposit, quad);
  CHECK(t.next_state == kOilDeposit);
  CHECK(t.reward == 1.0);

  t = oil_step(0.0, 0.5, quad);
  CHECK(t.next_state == 0.5);
  CHECK(t.reward == doctest::Approx(0.4363144921979877).epsilon(1e-13));

  OilConfig lap{SurveyKind::Laplace, 50.0, kOilDeposit};
  t = oil_step(0.0, 0.0, lap);
  CHECK(t.next_state == 0.0);
  CHECK(t.reward == doctest::Approx(4.5995234619815374e-17).epsilon(1e-10));

  // Clipping at zero.
  OilConfig sharp{SurveyKind::Quadratic, 50.0, kOilDeposit};
  CHECK(oil_step(0.3, 0.0, sharp).reward == 0.0);

  // Pure function.
  const auto a = oil_step(0.2, 0.9, quad);
  const auto b = oil_step(0.2, 0.9, quad);
  CHECK(a.reward == b.reward);
  CHECK(a.next_state == b.next_state);
}

TEST_CASE("oil reset always returns 0") {
  OilEnvironment lap({SurveyKind::Laplace, 1.0, kOilDeposit}, 5);
  OilEnvironment quad({SurveyKind::Quadratic, 1.0, kOilDeposit}, 5);
  Rng rng(1);
  for (int i = 0; i < 3; ++i) {
    CHECK(lap.reset(rng) == 0.0);
    CHECK(quad.reset(rng) == 0.0);
  }
  CHECK(lap.deterministic());
}

TEST_CASE("ambulance reward") {
  CHECK(ambulance_reward(0.3, 0.3, 0.9, 1.0) == 1.0);
  CHECK(ambulance_reward(0.2, 0.6, 0.7, 0.25) == doctest::Approx(0.825));
  CHECK(ambulance_reward(0.1, 0.6, 0.6, 0.0) == 1.0);
}

TEST_CASE("ambulance step and reset") {
  AmbulanceConfig cfg{ArrivalKind::Uniform, 0.25};
  Rng a(7), b(7);
  const double s1 = ambulance_reset(cfg, a);
  CHECK(s1 == ambulance_reset(cfg, b));
  CHECK(s1 >= 0.0);
  CHECK(s1 <= 1.0);

  AmbulanceConfig beta{ArrivalKind::Beta, 0.0};
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double s = ambulance_reset(beta, rng);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    const auto t = ambulance_step(s, rng.uniform(), cfg, rng);
    CHECK(t.reward >= 0.0);
    CHECK(t.reward <= 1.0);
    CHECK(t.next_state >= 0.0);
    CHECK(t.next_state <= 1.0);
  }
}

TEST_CASE("Beta(5,2) sampler moments") {
  Rng rng(2024);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  bool in_support = true;
  for (int i = 0; i < n; ++i) {
    const double x = sample_beta_5_2(rng);
    in_support = in_support && x > 0.0 && x < 1.0;
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(in_support);
  CHECK(mean == doctest::Approx(5.0 / 7.0).epsilon(0.01));
  CHECK(std::abs(var - 10.0 / 392.0) < 0.001);
}

TEST_CASE("Beta(5,2) sampler passes Kolmogorov-Smirnov at alpha = 0.01") {
  Rng rng(99);
  const int n = 10000;
  std::vector<double> xs(n);
  for (double& x : xs) x = sample_beta_5_2(rng);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = beta_5_2_cdf(xs[static_cast<std::size_t>(i)]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  // Asymptotic critical value 1.628 / sqrt(n).
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("ambulance arrivals do not depend on state or action") {
  // Chi-square homogeneity over 10 bins, two (x, a) pairs, 10^4 samples each.
  AmbulanceConfig cfg{ArrivalKind::Beta, 0.5};
  Rng r1(11), r2(12);
  std::array<double, 10> c1{}, c2{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    c1[std::min(9, static_cast<int>(ambulance_step(0.05, 0.1, cfg, r1).next_state * 10))] += 1;
    c2[std::min(9, static_cast<int>(ambulance_step(0.95, 0.8, cfg, r2).next_state * 10))] += 1;
  }
  double chi2 = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double total = c1[k] + c2[k];
    if (total == 0) continue;
    const double e = total / 2.0;
    chi2 += (c1[k] - e) * (c1[k] - e) / e + (c2[k] - e) * (c2[k] - e) / e;
  }
  // chi2(9) critical value at alpha = 0.01.
  CHECK(chi2 < 21.666);
}

TEST_CASE("heuristics") {
  Rng rng(5);
  AmbulanceEnvironment stay({ArrivalKind::Uniform, 1.0}, 5);
  for (int i = 0; i < 20; ++i) CHECK(heuristic_rollout(Heuristic::NoMovement, stay, rng) == 5.0);

  // E|U - 1/2| = 1/4, so the mean heuristic earns 0.75 per step at c = 0.
  AmbulanceEnvironment uni({ArrivalKind::Uniform, 0.0}, 5);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += heuristic_rollout(Heuristic::Mean, uni, rng);
  CHECK(sum / n == doctest::Approx(3.75).epsilon(0.005));

  // Quadrature: 5 (1 - E|X - 5/7|) = 4.349500529 for X ~ Beta(5,2).
  AmbulanceEnvironment beta({ArrivalKind::Beta, 0.0}, 5);
  sum = 0.0;
  for (int i = 0; i < n; ++i) sum += heuristic_rollout(Heuristic::Mean, beta, rng);
  CHECK(sum / n == doctest::Approx(4.349500529).epsilon(0.005));

  OilEnvironment oil({SurveyKind::Laplace, 1.0, kOilDeposit}, 5);
  CHECK_THROWS_AS(heuristic_rollout(Heuristic::Mean, oil, rng), std::invalid_argument);
}

TEST_CASE("random rollouts") {
  // Quadrature oracle for oil / quadratic / lambda = 1: 2.483688270831673.
  OilEnvironment oil({SurveyKind::Quadratic, 1.0, kOilDeposit}, 5);
  Rng rng(17);
  double sum = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double r = random_rollout(oil, rng);
    CHECK(r >= 0.0);
    CHECK(r <= 5.0);
    sum += r;
  }
  CHECK(sum / n == doctest::Approx(2.483688270831673).epsilon(0.01));
  CHECK(std::abs(sum / n - 2.50) <= 0.15);

  // Uniform random action against uniform arrivals: 5 (1 - E|U - V|) = 10/3 for any c.
  for (double c : {0.0, 0.25, 1.0}) {
    AmbulanceEnvironment amb({ArrivalKind::Uniform, c}, 5);
    sum = 0.0;
    for (int i = 0; i < n; ++i) sum += random_rollout(amb, rng);
    CHECK(sum / n == doctest::Approx(10.0 / 3.0).epsilon(0.01));
  }
}

TEST_CASE("max reward bound") {
  CHECK(max_reward_bound(5, kOilDeposit) == doctest::Approx(4.2476401224401705));
  CHECK(max_reward_bound(50, kOilDeposit) == doctest::Approx(49.24764012244017));
  CHECK(max_reward_bound(5, 0.0) == 5.0);
}

TEST_CASE("environment config parsing and validation") {
  CHECK(parse_env_kind("oil") == EnvKind::Oil);
  CHECK(parse_survey_kind("quadratic") == SurveyKind::Quadratic);
  CHECK(parse_arrival_kind("beta") == ArrivalKind::Beta);
  CHECK_THROWS_AS(parse_env_kind("cartpole"), std::invalid_argument);
  CHECK_THROWS_AS(AmbulanceEnvironment({ArrivalKind::Uniform, 1.5}, 5), std::invalid_argument);
  CHECK_THROWS_AS(OilEnvironment({SurveyKind::Laplace, 0.0, kOilDeposit}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(OilEnvironment({SurveyKind::Laplace, 1.0, kOilDeposit}, 0),
                  std::invalid_argument);
  EnvConfig cfg;
  cfg.kind = EnvKind::Ambulance;
  cfg.horizon = 7;
  const auto env = make_environment(cfg);
  CHECK(env->kind() == EnvKind::Ambulance);
  CHECK(env->horizon() == 7);
}
