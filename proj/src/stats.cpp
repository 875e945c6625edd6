#include "spaql/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace spaql {

double sample_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("sample_mean: empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = sample_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

AggregateResult aggregate(std::span<const double> values) {
  AggregateResult r;
  r.n = static_cast<int>(values.size());
  r.mean = sample_mean(values);
  r.std = std::sqrt(sample_variance(values));
  r.ci95_half_width = kCi95Factor * r.std / std::sqrt(static_cast<double>(r.n));
  return r;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("welch_t_test: each sample needs at least two values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  if (va + vb == 0.0) {
    throw std::invalid_argument("welch_t_test: both samples have zero variance");
  }
  const double t = (sample_mean(a) - sample_mean(b)) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(df);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return {t, std::min(1.0, p), df};
}

}  // namespace spaql
