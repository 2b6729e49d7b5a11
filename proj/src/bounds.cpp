#include "seqrp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqrp/error.hpp"

namespace seqrp {

void PlanParams::validate() const {
  detail::require(eps > 0.0 && eps < 1.0, "plan: eps must lie in (0, 1)");
  detail::require(delta > 0.0 && delta < 1.0, "plan: delta must lie in (0, 1)");
  detail::require(c0 > 0.0 && std::isfinite(c0), "plan: c0 must be positive");
  detail::require(c_x > 0.0 && std::isfinite(c_x), "plan: c_x must be positive");
  detail::require(x0_sq > 0.0 && std::isfinite(x0_sq), "plan: x0_sq must be positive");
  detail::require(T >= 1, "plan: T must be >= 1");
}

double plan_log_budget(const PlanParams& p) {
  p.validate();
  return -std::log(p.delta) + std::log1p(p.c_x * static_cast<double>(p.T) / p.x0_sq);
}

std::size_t required_dimension(double eps, double c0, double log_budget) {
  detail::require(eps > 0.0 && eps < 1.0, "required_dimension: eps must lie in (0, 1)");
  detail::require(c0 > 0.0, "required_dimension: c0 must be positive");
  detail::require(log_budget >= 0.0 && std::isfinite(log_budget),
                  "required_dimension: log budget must be finite and nonnegative");
  const double rhs = 16.0 * c0 * (1.0 + eps) / (eps * eps) * log_budget;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(rhs)));
}

PlanResult plan_for_dimension(const PlanParams& p, std::size_t M) {
  p.validate();
  detail::require(M >= 1, "plan: M must be >= 1");
  const double m = static_cast<double>(M);
  const double T = static_cast<double>(p.T);
  PlanResult r;
  r.M = M;
  r.L_T = 2.0 * p.c0 * (1.0 + p.eps) * p.x0_sq * p.x0_sq / m;
  r.B_sq_as_bound =
      4.0 * p.c0 * (1.0 + p.eps) / m * (p.c_x * p.x0_sq * T + 0.5 * p.c_x * p.c_x * T * T);
  r.dimension_rhs = 16.0 * p.c0 * (1.0 + p.eps) / (p.eps * p.eps) * plan_log_budget(p);
  return r;
}

PlanResult plan_dimension(const PlanParams& p) {
  return plan_for_dimension(p, required_dimension(p.eps, p.c0, plan_log_budget(p)));
}

std::size_t union_bound_baseline(double eps, double delta, std::size_t T, double c0) {
  detail::require(eps > 0.0 && eps < 1.0, "baseline: eps must lie in (0, 1)");
  detail::require(delta > 0.0 && delta < 1.0, "baseline: delta must lie in (0, 1)");
  detail::require(c0 > 0.0, "baseline: c0 must be positive");
  detail::require(T >= 1, "baseline: T must be >= 1");
  const double rhs =
      8.0 * c0 / (eps * eps) * std::log(2.0 * (static_cast<double>(T) + 1.0) / delta);
  return static_cast<std::size_t>(std::ceil(rhs));
}

BoundAccumulator::BoundAccumulator(double L, std::size_t M, double c0, double eps)
    : L_(L), M_(M), c0_(c0), eps_(eps) {
  detail::require(L > 0.0 && std::isfinite(L), "accumulator: L must be positive");
  detail::require(M >= 1, "accumulator: M must be >= 1");
  detail::require(c0 > 0.0, "accumulator: c0 must be positive");
  detail::require(eps > 0.0 && eps < 1.0, "accumulator: eps must lie in (0, 1)");
}

double BoundAccumulator::variance_increment(double x_t, double S_prev) const noexcept {
  return 4.0 * c0_ / static_cast<double>(M_) * x_t * x_t * (1.0 + eps_) * S_prev;
}

void BoundAccumulator::accumulate(const StepOutcome& outcome, double x_t, double S_prev,
                                  bool stopped) {
  detail::require(S_prev >= 0.0, "accumulate: S_prev must be nonnegative");
  if (stopped) return;
  A_ += outcome.stopped_increment;
  B_sq_ += variance_increment(x_t, S_prev);
}

double boundary(double B_sq, double L, double delta) {
  detail::require(L > 0.0, "boundary: L must be positive");
  detail::require(B_sq >= 0.0, "boundary: B_sq must be nonnegative");
  detail::require(delta > 0.0 && delta < 1.0, "boundary: delta must lie in (0, 1)");
  const double v = B_sq + L;
  // ln((1/delta) sqrt(v / L)), guarded at the max(argument, 1) floor.
  const double log_arg = std::max(0.0, -std::log(delta) + 0.5 * std::log1p(B_sq / L));
  return std::sqrt(2.0 * v * log_arg);
}

double log_mixture_value(double A, double B_sq, double L) {
  detail::require(L > 0.0, "mixture_value: L must be positive");
  detail::require(B_sq >= 0.0, "mixture_value: B_sq must be nonnegative");
  const double v = L + B_sq;
  return -0.5 * std::log1p(B_sq / L) + 0.5 * A * A / v;
}

double mixture_value(double A, double B_sq, double L) {
  return std::exp(log_mixture_value(A, B_sq, L));
}

double exponential_supermartingale(double A, double B_sq, double lambda) {
  return std::exp(lambda * A - 0.5 * lambda * lambda * B_sq);
}

}  // namespace seqrp
