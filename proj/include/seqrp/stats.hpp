#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace seqrp::stats {

/// Streaming mean/variance (Welford).
class RunningMoments {
 public:
  void push(double x) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  /// Standard error of the mean.
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion. z defaults to the 95% quantile.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

/// Standard error sqrt(p(1-p)/n) of a proportion.
double binomial_se(double p, std::size_t n);

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test of `samples` against a continuous CDF.
/// Sorts a copy of the samples. p-value uses the asymptotic law with the
/// Stephens small-sample correction.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

}  // namespace seqrp::stats
