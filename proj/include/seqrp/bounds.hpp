#pragma once

#include <cstddef>

#include "seqrp/sketch.hpp"

namespace seqrp {

struct PlanParams {
  double eps = 0.5;
  double delta = 0.05;
  double c0 = 1.0;
  double c_x = 1.0;
  double x0_sq = 1.0;
  std::size_t T = 100;

  /// Throws ValidationError on any out-of-range field.
  void validate() const;
};

struct PlanResult {
  std::size_t M = 0;
  /// Mixture precision 2 c0 (1 + eps) x0^4 / M.
  double L_T = 0.0;
  /// Almost-sure bound (4 c0 (1 + eps) / M)(c_x x0^2 T + c_x^2 T^2 / 2) on the stopped B^2.
  double B_sq_as_bound = 0.0;
  /// Right-hand side of the dimension condition before rounding.
  double dimension_rhs = 0.0;
};

/// ln(1/delta) + ln(1 + c_x T / x0^2).
double plan_log_budget(const PlanParams& p);

/// ceil(16 c0 (1 + eps) / eps^2 * log_budget).
std::size_t required_dimension(double eps, double c0, double log_budget);

/// Smallest M satisfying the sequential JL dimension condition, with the
/// matching mixture scale and the almost-sure variance-proxy bound.
PlanResult plan_dimension(const PlanParams& p);

/// L_T and the B^2 bound for an arbitrary (possibly overridden) dimension M.
PlanResult plan_for_dimension(const PlanParams& p, std::size_t M);

/// Baseline dimension for an independent (non-adaptive) stream with a union
/// bound over t = 0..T: ceil((8 c0 / eps^2) ln(2 (T + 1) / delta)). The
/// constants are a Chernoff-style convention, not a sharp result.
std::size_t union_bound_baseline(double eps, double delta, std::size_t T, double c0);

/// Self-normalized pair (A_t, B_t^2) of the stopped increments.
class BoundAccumulator {
 public:
  BoundAccumulator(double L, std::size_t M, double c0, double eps);

  /// A += outcome.stopped_increment;
  /// B^2 += (4 c0 / M) x_t^2 (1 + eps) S_prev, unless `stopped` (t > tau).
  void accumulate(const StepOutcome& outcome, double x_t, double S_prev, bool stopped);

  /// (C_t)^2 for an unstopped step.
  double variance_increment(double x_t, double S_prev) const noexcept;

  double A() const noexcept { return A_; }
  double B_sq() const noexcept { return B_sq_; }
  double L() const noexcept { return L_; }
  std::size_t M() const noexcept { return M_; }
  double c0() const noexcept { return c0_; }
  double eps() const noexcept { return eps_; }

 private:
  double A_ = 0.0;
  double B_sq_ = 0.0;
  double L_;
  std::size_t M_;
  double c0_;
  double eps_;
};

/// Anytime boundary sqrt(2 (B^2 + L) ln((1/delta) sqrt((B^2 + L) / L))).
double boundary(double B_sq, double L, double delta);

/// Gaussian-mixture supermartingale sqrt(L / (L + B^2)) exp(A^2 / (2 (L + B^2))).
double mixture_value(double A, double B_sq, double L);
double log_mixture_value(double A, double B_sq, double L);

/// exp(lambda A - lambda^2 B^2 / 2).
double exponential_supermartingale(double A, double B_sq, double lambda);

}  // namespace seqrp
