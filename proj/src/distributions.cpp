#include "seqrp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "seqrp/error.hpp"
#include "seqrp/stats.hpp"

namespace seqrp {

double dot(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), "dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_sq(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

ProjectionVector::ProjectionVector(std::vector<double> coords) : coords_(std::move(coords)) {
  detail::require(!coords_.empty(), "projection vector: dimension must be >= 1");
  const double n = std::sqrt(seqrp::norm_sq(coords_));
  if (!(std::abs(n - 1.0) <= kNormTolerance)) {
    throw ValidationError("projection vector: norm " + std::to_string(n) + " is not 1");
  }
}

ProjectionVector ProjectionVector::basis(std::size_t dim, std::size_t index) {
  detail::require(index < dim, "basis: index out of range");
  std::vector<double> c(dim, 0.0);
  c[index] = 1.0;
  return ProjectionVector(std::move(c));
}

double ProjectionVector::norm_sq() const noexcept { return seqrp::norm_sq(coords_); }

SubGaussianSpec SubGaussianSpec::make(double c0, std::size_t M) {
  detail::require(c0 > 0.0 && std::isfinite(c0), "sub-Gaussian spec: c0 must be positive");
  detail::require(M >= 1, "sub-Gaussian spec: M must be >= 1");
  return {c0, M};
}

double SubGaussianSpec::sigma() const noexcept { return std::sqrt(sigma_sq()); }

BetaLawParams BetaLawParams::make(double alpha, double beta) {
  detail::require(alpha > 0.0 && std::isfinite(alpha), "beta law: alpha must be positive");
  detail::require(beta > 0.0 && std::isfinite(beta), "beta law: beta must be positive");
  return {alpha, beta};
}

double BetaLawParams::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(alpha, beta, x);
}

ProjectionVector sample_sphere(std::size_t M, Rng& rng) {
  if (M == 0) throw ValidationError("sample_sphere: invalid dimension M = 0");
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(M);
  for (;;) {
    for (auto& v : c) v = normal(rng);
    const double n = std::sqrt(norm_sq(c));
    if (n >= 1e-300) {
      for (auto& v : c) v /= n;
      break;
    }
  }
  return ProjectionVector(std::move(c));
}

InnerProductLaw inner_product_law(std::size_t M) {
  if (M < 2) {
    throw ValidationError("inner_product_law: M = " + std::to_string(M) +
                          " unsupported (M = 1 is the two-point law)");
  }
  const double a = 0.5 * static_cast<double>(M - 1);
  return {M, BetaLawParams::make(a, a)};
}

std::size_t MgfReport::violations() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const MgfCheckRow& r) { return !r.pass; }));
}

namespace {

// Estimates E[exp(lambda v)] over `values` for each lambda and compares to
// exp(lambda^2 var_proxy / 2) with kMgfSlackSe standard errors of slack.
MgfReport mgf_against_bound(std::span<const double> values, std::span<const double> lambdas,
                            double var_proxy) {
  MgfReport report;
  report.n_samples = values.size();
  for (double lambda : lambdas) {
    stats::RunningMoments m;
    for (double v : values) m.push(std::exp(lambda * v));
    MgfCheckRow row;
    row.lambda = lambda;
    row.empirical = m.mean();
    row.std_error = m.std_error();
    row.bound = std::exp(0.5 * lambda * lambda * var_proxy);
    row.pass = row.empirical <= row.bound + kMgfSlackSe * row.std_error;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

MgfReport check_beta_mgf(const BetaLawParams& params, std::span<const double> lambdas,
                         std::size_t n_samples, Rng& rng) {
  const auto p = BetaLawParams::make(params.alpha, params.beta);
  if (p.alpha < p.beta) {
    throw ValidationError("check_beta_mgf: requires alpha >= beta");
  }
  detail::require(n_samples >= 1, "check_beta_mgf: n_samples must be >= 1");
  boost::random::gamma_distribution<double> ga(p.alpha, 1.0);
  boost::random::gamma_distribution<double> gb(p.beta, 1.0);
  const double mean = p.mean();
  std::vector<double> centered(n_samples);
  for (auto& v : centered) {
    const double x = ga(rng);
    const double y = gb(rng);
    v = x / (x + y) - mean;
  }
  return mgf_against_bound(centered, lambdas, p.variance());
}

MgfReport check_subgaussian_mgf(const ProjectionSampler& sampler, const SubGaussianSpec& spec,
                                std::span<const double> direction,
                                std::span<const double> lambdas, std::size_t n_samples, Rng& rng) {
  const auto s = SubGaussianSpec::make(spec.c0, spec.M);
  detail::require(direction.size() == s.M, "check_subgaussian_mgf: direction dimension != M");
  detail::require(std::abs(std::sqrt(norm_sq(direction)) - 1.0) <= ProjectionVector::kNormTolerance,
                  "check_subgaussian_mgf: direction must have unit norm");
  detail::require(n_samples >= 1, "check_subgaussian_mgf: n_samples must be >= 1");
  std::vector<double> inner(n_samples);
  for (auto& v : inner) {
    const ProjectionVector z = sampler(rng);
    detail::require(z.dim() == s.M, "check_subgaussian_mgf: sampler dimension != M");
    v = dot(z.coords(), direction);
  }
  return mgf_against_bound(inner, lambdas, s.sigma_sq());
}

InnerProductFit check_inner_product_law(std::size_t M, std::span<const double> direction,
                                        std::size_t n_samples, Rng& rng, double significance) {
  const InnerProductLaw law = inner_product_law(M);
  detail::require(direction.size() == M, "check_inner_product_law: direction dimension != M");
  detail::require(std::abs(std::sqrt(norm_sq(direction)) - 1.0) <= ProjectionVector::kNormTolerance,
                  "check_inner_product_law: direction must have unit norm");
  detail::require(n_samples >= 2, "check_inner_product_law: n_samples must be >= 2");
  detail::require(significance > 0.0 && significance < 1.0,
                  "check_inner_product_law: significance must be in (0, 1)");

  std::vector<double> inner(n_samples);
  for (auto& v : inner) v = dot(sample_sphere(M, rng).coords(), direction);

  InnerProductFit fit;
  fit.M = M;
  fit.n_samples = n_samples;
  fit.significance = significance;
  const auto ks = stats::ks_test(inner, [&law](double x) { return law.cdf(x); });
  fit.ks_statistic = ks.statistic;
  fit.p_value = ks.p_value;
  fit.rejected = ks.p_value < significance;

  // SE of the sample variance: sqrt((m4 - s^4) / n).
  stats::RunningMoments moments;
  for (double v : inner) moments.push(v);
  double m4 = 0.0;
  for (double v : inner) {
    const double d = v - moments.mean();
    m4 += d * d * d * d;
  }
  m4 /= static_cast<double>(n_samples);
  fit.sample_variance = moments.variance();
  fit.variance_se = std::sqrt(std::max(0.0, m4 - fit.sample_variance * fit.sample_variance) /
                              static_cast<double>(n_samples));
  fit.target_variance = 1.0 / static_cast<double>(M);
  fit.variance_ok = std::abs(fit.sample_variance - fit.target_variance) <= 3.0 * fit.variance_se;
  return fit;
}

std::vector<double> default_lambda_grid() { return {-5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0}; }

}  // namespace seqrp
