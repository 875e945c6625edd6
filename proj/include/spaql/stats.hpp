#ifndef SPAQL_STATS_HPP
#define SPAQL_STATS_HPP

#include <span>

namespace spaql {

inline constexpr double kCi95Factor = 1.96;

/// Cross-agent summary. std is the sample standard deviation (0 when n = 1)
/// and ci95_half_width = 1.96 * std / sqrt(n).
struct AggregateResult {
  double mean = 0.0;
  double std = 0.0;
  double ci95_half_width = 0.0;
  int n = 0;
};

AggregateResult aggregate(std::span<const double> values);

double sample_mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

struct WelchResult {
  double t;
  double p;   // two-sided
  double df;  // Welch-Satterthwaite
};

/// Two-sided Welch t-test. Throws std::invalid_argument when a sample has
/// fewer than two values or both samples have zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace spaql

#endif  // SPAQL_STATS_HPP
