#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "seqrp/bounds.hpp"
#include "seqrp/error.hpp"

namespace {

using namespace seqrp;

PlanParams params(double eps, double delta, double c0, double c_x, double x0_sq, std::size_t T) {
  PlanParams p;
  p.eps = eps;
  p.delta = delta;
  p.c0 = c0;
  p.c_x = c_x;
  p.x0_sq = x0_sq;
  p.T = T;
  return p;
}

// --- planner examples ---

TEST(PlanDimension, TrivialCase96) {
  // ln(1/delta) = 1 and the horizon term vanishes: 16 * 1.5 / 0.25 = 96.
  EXPECT_EQ(required_dimension(0.5, 1.0, 1.0), 96u);
  // Closest reachable PlanParams: delta = 1/e, c_x T / x0^2 = 1e-30.
  const auto r = plan_dimension(params(0.5, std::exp(-1.0), 1.0, 1e-30, 1.0, 1));
  EXPECT_EQ(r.M, 96u);
}

TEST(PlanDimension, Example886) {
  const auto r = plan_dimension(params(0.5, 0.01, 1.0, 1.0, 1.0, 100));
  EXPECT_EQ(r.M, 886u);
  EXPECT_NEAR(r.dimension_rhs, 885.1479074716, 1e-9);
  EXPECT_NEAR(r.dimension_rhs,
              static_cast<double>(oracle::planner_rhs(0.5, 0.01, 1.0, 1.0, 1.0, 100)), 1e-10);
}

TEST(PlanDimension, Example2951) {
  const auto r = plan_dimension(params(0.25, 0.01, 1.0, 1.0, 1.0, 100));
  EXPECT_EQ(r.M, 2951u);
  EXPECT_LT(r.M, plan_dimension(params(0.2, 0.01, 1.0, 1.0, 1.0, 100)).M);
  EXPECT_GT(r.M, plan_dimension(params(0.5, 0.01, 1.0, 1.0, 1.0, 100)).M);
}

TEST(PlanDimension, DerivedQuantities) {
  const auto p = params(0.5, 0.01, 1.0, 1.0, 1.0, 100);
  const auto r = plan_dimension(p);
  EXPECT_DOUBLE_EQ(r.L_T, 2.0 * 1.5 / 886.0);
  EXPECT_DOUBLE_EQ(r.B_sq_as_bound, 4.0 * 1.5 / 886.0 * (100.0 + 5000.0));
  const auto o = plan_for_dimension(p, 400);
  EXPECT_EQ(o.M, 400u);
  EXPECT_DOUBLE_EQ(o.L_T, 3.0 / 400.0);
  EXPECT_DOUBLE_EQ(o.dimension_rhs, r.dimension_rhs);
  const auto q = plan_for_dimension(params(0.3, 0.1, 2.0, 0.5, 3.0, 7), 10);
  EXPECT_DOUBLE_EQ(q.L_T, 2.0 * 2.0 * 1.3 * 9.0 / 10.0);
  EXPECT_DOUBLE_EQ(q.B_sq_as_bound, 4.0 * 2.0 * 1.3 / 10.0 * (0.5 * 3.0 * 7.0 + 0.25 * 49.0 / 2.0));
}

TEST(PlanDimension, InvalidParams) {
  EXPECT_THROW(plan_dimension(params(0.0, 0.1, 1, 1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(1.0, 0.1, 1, 1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, 0.0, 1, 1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, 1.0, 1, 1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, 0.1, 0, 1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, 0.1, 1, -1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, 0.1, 1, 1, 0, 10)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, 0.1, 1, 1, 1, 0)), ValidationError);
  EXPECT_THROW(plan_dimension(params(0.5, std::nan(""), 1, 1, 1, 10)), ValidationError);
  EXPECT_THROW(plan_for_dimension(params(0.5, 0.1, 1, 1, 1, 10), 0), ValidationError);
}

// --- planner properties ---

struct TupleGen {
  std::mt19937_64 rng{20240601};
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  PlanParams next() {
    return params(uniform(0.05, 0.95), log_uniform(1e-6, 0.5), log_uniform(0.1, 10.0),
                  log_uniform(0.01, 100.0), log_uniform(0.01, 100.0),
                  static_cast<std::size_t>(log_uniform(1.0, 1e6)));
  }
};

TEST(PlanDimensionProperty, MatchesHighPrecisionOracle) {
  TupleGen gen;
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = gen.next();
    const oracle::hp rhs = oracle::planner_rhs(p.eps, p.delta, p.c0, p.c_x, p.x0_sq, p.T);
    const double rhs_d = static_cast<double>(rhs);
    // Skip tuples whose right-hand side sits within rounding distance of an integer.
    if (std::abs(rhs_d - std::round(rhs_d)) < 1e-9 * rhs_d) continue;
    const auto expected = static_cast<std::size_t>(std::ceil(rhs_d));
    ASSERT_EQ(plan_dimension(p).M, std::max<std::size_t>(1, expected)) << "tuple " << i;
    ++compared;
  }
  EXPECT_GT(compared, 990);
}

TEST(PlanDimensionProperty, Monotone) {
  TupleGen gen;
  for (int i = 0; i < 1000; ++i) {
    const auto p = gen.next();
    const std::size_t M = plan_dimension(p).M;
    auto with = [&](auto mutate) {
      PlanParams q = p;
      mutate(q);
      return plan_dimension(q).M;
    };
    // Nonincreasing in eps and x0^2.
    ASSERT_GE(M, with([](PlanParams& q) { q.eps = std::min(0.99, q.eps * 1.1); }));
    ASSERT_LE(M, with([](PlanParams& q) { q.eps *= 0.9; }));
    ASSERT_GE(M, with([](PlanParams& q) { q.x0_sq *= 1.5; }));
    // Nondecreasing in T, c_x, c0 and 1/delta.
    ASSERT_LE(M, with([](PlanParams& q) { q.T += 1 + q.T / 3; }));
    ASSERT_LE(M, with([](PlanParams& q) { q.c_x *= 1.5; }));
    ASSERT_LE(M, with([](PlanParams& q) { q.c0 *= 1.5; }));
    ASSERT_LE(M, with([](PlanParams& q) { q.delta *= 0.5; }));
    // Tiny steps must not break monotonicity either.
    ASSERT_LE(M, with([](PlanParams& q) { q.T += 1; }));
    ASSERT_GE(M, with([](PlanParams& q) { q.eps = std::nextafter(q.eps, 1.0); }));
  }
}

// --- baseline ---

TEST(UnionBoundBaseline, Examples) {
  EXPECT_EQ(union_bound_baseline(0.5, 0.01, 100, 1.0), 318u);
  // ceil(128 ln 20200) = ceil(1268.920...) = 1269.
  EXPECT_EQ(union_bound_baseline(0.25, 0.01, 100, 1.0), 1269u);
  EXPECT_NEAR(static_cast<double>(oracle::baseline_rhs(0.25, 0.01, 100, 1.0)), 1268.9199, 1e-3);
  EXPECT_THROW(union_bound_baseline(0.5, 0.01, 0, 1.0), ValidationError);
}

TEST(UnionBoundBaseline, MatchesOracle) {
  TupleGen gen;
  for (int i = 0; i < 300; ++i) {
    const auto p = gen.next();
    const double rhs = static_cast<double>(oracle::baseline_rhs(p.eps, p.delta, p.T, p.c0));
    if (std::abs(rhs - std::round(rhs)) < 1e-9 * rhs) continue;
    ASSERT_EQ(union_bound_baseline(p.eps, p.delta, p.T, p.c0),
              static_cast<std::size_t>(std::ceil(rhs)));
  }
}

// --- accumulator ---

TEST(BoundAccumulator, ZeroInputChangesNothing) {
  BoundAccumulator acc(1.0, 100, 1.0, 0.5);
  StepOutcome out;
  acc.accumulate(out, 0.0, 2.0, false);
  EXPECT_EQ(acc.A(), 0.0);
  EXPECT_EQ(acc.B_sq(), 0.0);
}

TEST(BoundAccumulator, VarianceIncrementExample) {
  BoundAccumulator acc(1.0, 100, 1.0, 0.5);
  EXPECT_NEAR(acc.variance_increment(1.0, 2.0), 0.12, 1e-15);
  StepOutcome out;
  out.y_increment = out.stopped_increment = 0.3;
  acc.accumulate(out, 1.0, 2.0, false);
  EXPECT_NEAR(acc.B_sq(), 0.12, 1e-15);
  EXPECT_EQ(acc.A(), 0.3);
}

TEST(BoundAccumulator, StoppedStepsAreZero) {
  BoundAccumulator acc(1.0, 10, 1.0, 0.5);
  StepOutcome out;
  out.y_increment = 5.0;
  out.stopped_increment = 0.0;
  out.stopped = true;
  acc.accumulate(out, 1.0, 3.0, true);
  EXPECT_EQ(acc.A(), 0.0);
  EXPECT_EQ(acc.B_sq(), 0.0);
}

TEST(BoundAccumulator, Validation) {
  EXPECT_THROW(BoundAccumulator(0.0, 10, 1.0, 0.5), ValidationError);
  EXPECT_THROW(BoundAccumulator(1.0, 0, 1.0, 0.5), ValidationError);
  EXPECT_THROW(BoundAccumulator(1.0, 10, 0.0, 0.5), ValidationError);
}

// --- boundary and mixture ---

TEST(Boundary, Examples) {
  EXPECT_NEAR(boundary(0.0, 1.0, std::exp(-1.0)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(boundary(3.0, 1.0, 0.1), 4.895493661361633, 1e-13);
  EXPECT_NEAR(boundary(3.0, 1.0, 0.1), static_cast<double>(oracle::boundary(3.0, 1.0, 0.1)), 1e-13);
  EXPECT_THROW(boundary(0.0, 0.0, 0.1), ValidationError);
  EXPECT_THROW(boundary(0.0, -1.0, 0.1), ValidationError);
  EXPECT_THROW(boundary(-1.0, 1.0, 0.1), ValidationError);
}

TEST(Boundary, GuardNearDeltaOne) {
  // ln(1/delta) underflows towards 0 as delta -> 1; the guarded form stays real.
  const double b = boundary(0.0, 1.0, std::nextafter(1.0, 0.0));
  EXPECT_TRUE(std::isfinite(b));
  EXPECT_GE(b, 0.0);
}

TEST(Mixture, Examples) {
  EXPECT_EQ(mixture_value(0.0, 0.0, 1.0), 1.0);
  EXPECT_NEAR(mixture_value(2.0, 3.0, 1.0), 0.5 * std::exp(0.5), 1e-15);
  EXPECT_NEAR(mixture_value(2.0, 3.0, 1.0), 0.82436063535006407, 1e-15);
  EXPECT_THROW(mixture_value(0.0, 0.0, 0.0), ValidationError);
}

TEST(BoundaryProperty, MixtureAtBoundaryIsOneOverDelta) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double L = std::exp(-8.0 + 12.0 * u(rng));
    const double B = L * std::exp(-5.0 + 15.0 * u(rng));
    const double delta = std::exp(-12.0 * u(rng) - 1e-3);
    const double b = boundary(B, L, delta);
    EXPECT_NEAR(mixture_value(b, B, L) * delta, 1.0, 1e-9);
    EXPECT_NEAR(b, static_cast<double>(oracle::boundary(B, L, delta)), 1e-12 * b);
    const double A = (2.0 * u(rng) - 1.0) * b * 1.5;
    EXPECT_NEAR(mixture_value(A, B, L), static_cast<double>(oracle::mixture(A, B, L)),
                1e-10 * static_cast<double>(oracle::mixture(A, B, L)));
    // Crossing the boundary is exactly the event mixture >= 1 / delta.
    EXPECT_EQ(std::abs(A) > b * (1 + 1e-12), log_mixture_value(A, B, L) > -std::log(delta) + 1e-9);
  }
}

TEST(BoundaryProperty, MonotoneInBAndDelta) {
  double prev = 0.0;
  for (double B = 0.0; B < 1e4; B = 2.0 * B + 0.01) {
    const double b = boundary(B, 0.5, 0.05);
    EXPECT_GT(b, prev);
    prev = b;
  }
  EXPECT_GT(boundary(1.0, 1.0, 0.01), boundary(1.0, 1.0, 0.1));
}

TEST(ExponentialSupermartingale, Values) {
  EXPECT_EQ(exponential_supermartingale(0.0, 0.0, 1.5), 1.0);
  EXPECT_NEAR(exponential_supermartingale(1.0, 2.0, 0.5), std::exp(0.5 - 0.25), 1e-15);
}

}  // namespace
