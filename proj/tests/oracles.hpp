#pragma once

// Independent reference computations used to freeze expected values.
// Nothing here calls into the library under test.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_dec_float_50;

// Dimension condition right-hand side in 50-digit arithmetic.
inline hp planner_rhs(double eps, double delta, double c0, double c_x, double x0_sq,
                      std::size_t T) {
  const hp e(eps), d(delta), c(c0), cx(c_x), x0(x0_sq), t(static_cast<double>(T));
  using boost::multiprecision::log;
  return hp(16) * c * (hp(1) + e) / (e * e) * (log(hp(1) / d) + log(hp(1) + cx * t / x0));
}

inline hp baseline_rhs(double eps, double delta, std::size_t T, double c0) {
  const hp e(eps), d(delta), c(c0), t(static_cast<double>(T));
  using boost::multiprecision::log;
  return hp(8) * c / (e * e) * log(hp(2) * (t + hp(1)) / d);
}

inline hp boundary(double B_sq, double L, double delta) {
  const hp b(B_sq), l(L), d(delta);
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  return sqrt(hp(2) * (b + l) * log(hp(1) / d * sqrt((b + l) / l)));
}

inline hp mixture(double A, double B_sq, double L) {
  const hp a(A), b(B_sq), l(L);
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  return sqrt(l / (l + b)) * exp(a * a / (hp(2) * (l + b)));
}

// Exact failure probability of the M = 1 sketch under x_t = x for t = 1..T.
// With M = 1 every projection is +-1, so s_t is a +-x walk started at
// +-x0 (the sign of z0 is irrelevant by symmetry). Enumerates all 2^T sign
// paths; returns (#failing paths) / 2^T.
inline double m1_failure_probability(std::size_t T, double eps, double x0, double x) {
  const std::uint64_t n_paths = std::uint64_t{1} << T;
  std::uint64_t failing = 0;
  for (std::uint64_t mask = 0; mask < n_paths; ++mask) {
    long double s = x0;
    long double S = static_cast<long double>(x0) * x0;
    bool failed = false;
    for (std::size_t t = 0; t < T && !failed; ++t) {
      s += ((mask >> t) & 1u) ? x : -x;
      S += static_cast<long double>(x) * x;
      const long double Y = s * s - S;
      failed = std::fabs(Y) > eps * S;
    }
    failing += failed ? 1 : 0;
  }
  return static_cast<double>(failing) / static_cast<double>(n_paths);
}

// Var of Beta(a, b) by numerical quadrature of the density.
inline double beta_variance_quadrature(double a, double b) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double norm = boost::math::beta(a, b);
  auto pdf = [&](double x) { return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0) / norm; };
  const double m1 = integrator.integrate([&](double x) { return x * pdf(x); }, 0.0, 1.0);
  const double m2 = integrator.integrate([&](double x) { return x * x * pdf(x); }, 0.0, 1.0);
  return m2 - m1 * m1;
}

// E[exp(lambda (X - EX))] for X ~ Beta(a, b) by numerical quadrature.
inline double beta_centered_mgf(double a, double b, double lambda) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double mean = a / (a + b);
  auto kernel = [&](double x) { return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0); };
  // Normalizing by the quadrature of the kernel itself cancels most of the
  // endpoint-singularity error when a or b is below 1.
  const double num = integrator.integrate(
      [&](double x) { return std::exp(lambda * (x - mean)) * kernel(x); }, 0.0, 1.0);
  return num / integrator.integrate(kernel, 0.0, 1.0);
}

// ||v||^2 accumulated in extended precision.
inline double norm_sq_kahan(const std::vector<double>& v) {
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x) * x;
  return static_cast<double>(acc);
}

}  // namespace oracle
