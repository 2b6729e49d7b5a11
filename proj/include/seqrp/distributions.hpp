#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "seqrp/rng.hpp"

namespace seqrp {

/// A direction z in R^M with unit Euclidean norm.
///
/// Construction validates the norm (relative tolerance kNormTolerance), so a
/// ProjectionVector in hand is always a point on the sphere S^{M-1}.
class ProjectionVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  explicit ProjectionVector(std::vector<double> coords);

  /// Standard basis vector e_index in R^dim.
  static ProjectionVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  /// ||z||^2 as stored (1 up to rounding).
  double norm_sq() const noexcept;

 private:
  std::vector<double> coords_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> v);

/// Variance proxy sigma^2 = c0 / M for conditionally sub-Gaussian projections.
struct SubGaussianSpec {
  double c0 = 1.0;
  std::size_t M = 1;

  static SubGaussianSpec make(double c0, std::size_t M);
  /// The uniform sphere is sqrt(1/M)-sub-Gaussian.
  static SubGaussianSpec sphere(std::size_t M) { return make(1.0, M); }

  double sigma_sq() const noexcept { return c0 / static_cast<double>(M); }
  double sigma() const noexcept;
};

struct BetaLawParams {
  double alpha = 1.0;
  double beta = 1.0;

  static BetaLawParams make(double alpha, double beta);

  double mean() const noexcept { return alpha / (alpha + beta); }
  double variance() const noexcept {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
  /// Regularized incomplete beta I_x(alpha, beta), clamped outside [0, 1].
  double cdf(double x) const;
};

/// Law of <z, v> for z uniform on S^{M-1} and fixed unit v: 2 Beta((M-1)/2, (M-1)/2) - 1.
struct InnerProductLaw {
  std::size_t M = 2;
  BetaLawParams beta;

  static double map(double y) noexcept { return 2.0 * y - 1.0; }
  static double unmap(double x) noexcept { return 0.5 * (x + 1.0); }
  double cdf(double x) const { return beta.cdf(unmap(x)); }
  double variance() const noexcept { return 4.0 * beta.variance(); }
};

/// Uniform draw from S^{M-1}: M standard normals, normalized. Redraws if the
/// raw norm falls below 1e-300. Throws ValidationError for M = 0.
ProjectionVector sample_sphere(std::size_t M, Rng& rng);

/// Throws ValidationError for M < 2 (the M = 1 law is the two-point law on {-1, +1}).
InnerProductLaw inner_product_law(std::size_t M);

struct MgfCheckRow {
  double lambda = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct MgfReport {
  std::vector<MgfCheckRow> rows;
  std::size_t n_samples = 0;

  std::size_t violations() const noexcept;
  bool ok() const noexcept { return violations() == 0; }
};

/// Slack, in standard errors, granted to Monte Carlo MGF estimates.
inline constexpr double kMgfSlackSe = 3.0;

/// Monte Carlo check of E[exp(lambda (X - EX))] <= exp(lambda^2 Var X / 2)
/// for X ~ Beta(alpha, beta). Requires alpha >= beta.
MgfReport check_beta_mgf(const BetaLawParams& params, std::span<const double> lambdas,
                         std::size_t n_samples, Rng& rng);

using ProjectionSampler = std::function<ProjectionVector(Rng&)>;

/// Monte Carlo check of E[exp(lambda <z, v>)] <= exp(lambda^2 sigma^2 / 2).
/// `direction` must have unit norm and dimension spec.M.
MgfReport check_subgaussian_mgf(const ProjectionSampler& sampler, const SubGaussianSpec& spec,
                                std::span<const double> direction,
                                std::span<const double> lambdas, std::size_t n_samples, Rng& rng);

struct InnerProductFit {
  std::size_t M = 0;
  std::size_t n_samples = 0;
  double ks_statistic = 0.0;
  double p_value = 1.0;
  double significance = 1e-3;
  bool rejected = false;
  double sample_variance = 0.0;
  double variance_se = 0.0;
  double target_variance = 0.0;
  bool variance_ok = true;

  bool ok() const noexcept { return !rejected && variance_ok; }
};

/// Goodness of fit of sampled <z, v> against inner_product_law(M): KS test at
/// `significance` and |sample variance - 1/M| <= 3 SE.
InnerProductFit check_inner_product_law(std::size_t M, std::span<const double> direction,
                                        std::size_t n_samples, Rng& rng,
                                        double significance = 1e-3);

/// The lambda grid used by the distribution oracles.
std::vector<double> default_lambda_grid();

}  // namespace seqrp
