#include <cfloat>
#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "seqrp/config_io.hpp"
#include "seqrp/error.hpp"
#include "seqrp/harness.hpp"

namespace {

using namespace seqrp;

ExperimentConfig small_config(StrategyKind kind, std::size_t n_trials, std::uint64_t seed) {
  ExperimentConfig c;
  c.plan.eps = 0.5;
  c.plan.delta = 0.05;
  c.plan.T = 100;
  c.strategy.kind = kind;
  c.n_trials = n_trials;
  c.seed = seed;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_identical(const TrialRecord& a, const TrialRecord& b) {
  EXPECT_EQ(a.trial_id, b.trial_id);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.failed, b.failed);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_TRUE(same_bits(a.max_distortion, b.max_distortion));
  EXPECT_TRUE(same_bits(a.final_S, b.final_S));
  EXPECT_TRUE(same_bits(a.final_A, b.final_A));
  EXPECT_TRUE(same_bits(a.final_B_sq, b.final_B_sq));
  EXPECT_EQ(a.boundary_crossed, b.boundary_crossed);
  EXPECT_EQ(a.crossing_step, b.crossing_step);
  ASSERT_EQ(a.distortions.size(), b.distortions.size());
  for (std::size_t i = 0; i < a.distortions.size(); ++i) {
    ASSERT_TRUE(same_bits(a.distortions[i], b.distortions[i]));
  }
}

TEST(ExperimentConfig, Validation) {
  auto c = small_config(StrategyKind::kConstant, 0, 1);
  EXPECT_THROW(c.validate(), ValidationError);
  c.n_trials = 1;
  c.M_override = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c.M_override.reset();
  EXPECT_EQ(c.dimension(), plan_dimension(c.plan).M);
  EXPECT_TRUE(c.uses_planned_dimension());
  c.M_override = 10;
  EXPECT_EQ(c.dimension(), 10u);
  EXPECT_FALSE(c.uses_planned_dimension());
}

TEST(RunTrial, ZeroAfterZeroOnlyX0Contributes) {
  for (std::size_t M : {1u, 5u, 300u}) {
    auto c = small_config(StrategyKind::kZeroAfter, 1, 3);
    c.strategy.k = 0;
    c.M_override = M;
    const auto r = run_trial(c, 0, 11);
    EXPECT_FALSE(r.failed);
    EXPECT_FALSE(r.tau.has_value());
    EXPECT_EQ(r.final_S, 1.0);
    EXPECT_EQ(r.final_A, 0.0);
    EXPECT_EQ(r.final_B_sq, 0.0);
    ASSERT_EQ(r.distortions.size(), 101u);
    for (std::size_t t = 1; t < r.distortions.size(); ++t) {
      EXPECT_EQ(r.distortions[t], r.distortions[0]);
    }
    EXPECT_LE(r.max_distortion, 1e-12);
  }
}

TEST(RunTrial, ReplayIsBitIdentical) {
  const auto c = small_config(StrategyKind::kConstant, 1, 42);
  const auto a = run_trial(c, 0, trial_seed(42, 0));
  const auto b = run_trial(c, 0, trial_seed(42, 0));
  expect_identical(a, b);
}

TEST(RunTrial, OneDimensionalSketchIsASignWalk) {
  auto c = small_config(StrategyKind::kConstant, 1, 5);
  c.M_override = 1;
  c.plan.x0_sq = 9.0;
  c.plan.T = 10;
  c.trace_every = 1;
  for (std::size_t id = 0; id < 50; ++id) {
    const auto r = run_trial(c, id, trial_seed(5, id));
    ASSERT_EQ(r.trace.size(), 11u);
    for (const TraceRow& row : r.trace) {
      // ||s_t||^2 = Y + S must be the square of an integer (3 +- 1 +- 1 ...).
      const double s_abs = std::sqrt(row.Y + row.S);
      EXPECT_NEAR(s_abs, std::round(s_abs), 1e-12);
      EXPECT_EQ(row.S, 9.0 + static_cast<double>(row.t));
    }
  }
}

TEST(RunTrial, PerPathInvariants) {
  for (StrategyKind kind : kAllStrategies) {
    for (std::size_t M : {4u, 40u, 0u}) {
      auto c = small_config(kind, 1, 17);
      if (M != 0) c.M_override = M;
      const PlanResult plan = c.resolved_plan();
      const double scale = 4.0 * c.plan.c0 * (1.0 + c.plan.eps) / static_cast<double>(plan.M);
      for (std::size_t id = 0; id < 40; ++id) {
        const auto r = run_trial(c, id, trial_seed(c.seed, id));
        EXPECT_FALSE(r.invalid);
        EXPECT_TRUE(r.trigger_identity_ok);
        EXPECT_EQ(r.failed, r.tau.has_value());
        // Both almost-sure bounds on the stopped variance proxy, exactly.
        EXPECT_LE(r.final_B_sq, plan.B_sq_as_bound);
        EXPECT_LE(r.final_B_sq, scale * (r.stopped_S - c.plan.x0_sq) * r.stopped_S);
        if (r.boundary_crossed) {
          EXPECT_GE(r.crossing_mixture * c.plan.delta, 1.0 - 1e-9);
        }
      }
    }
  }
}

TEST(RunTrial, BoundaryConsistencyOnCrossings) {
  // A loose delta makes crossings common enough to exercise the identity.
  auto c = small_config(StrategyKind::kAmplify, 400, 23);
  c.plan.delta = 0.9;
  c.M_override = 8;
  const auto result = run_experiment(c, {1});
  std::size_t crossings = 0;
  for (const auto& t : result.trials) {
    if (!t.boundary_crossed) continue;
    ++crossings;
    EXPECT_GE(t.crossing_mixture, (1.0 / 0.9) * (1.0 - 1e-9));
    EXPECT_GE(*t.crossing_step, 1u);
  }
  EXPECT_GT(crossings, 0u);
  EXPECT_TRUE(result.report.checks.boundary_consistency_ok);
}

TEST(RunTrial, TracesAreKeptOneInN) {
  auto c = small_config(StrategyKind::kUniform, 6, 2);
  c.plan.T = 20;
  c.trace_every = 3;
  const auto result = run_experiment(c, {1});
  for (const auto& t : result.trials) {
    EXPECT_EQ(t.trace.size(), t.trial_id % 3 == 0 ? 21u : 0u);
  }
}

TEST(RunTrial, NonFiniteStateMarksTrialInvalid) {
  auto c = small_config(StrategyKind::kConstant, 3, 1);
  c.plan.c_x = DBL_MAX;
  c.plan.T = 1;
  c.M_override = 1;
  const auto result = run_experiment(c, {1});
  ASSERT_EQ(result.report.invalid_trials.size(), 3u);
  EXPECT_FALSE(result.report.checks.no_invalid_trials);
  EXPECT_FALSE(result.report.checks.all());
  EXPECT_EQ(result.report.n_valid, 0u);
  for (const auto& t : result.trials) {
    EXPECT_TRUE(t.invalid);
    EXPECT_FALSE(t.invalid_reason.empty());
  }
}

TEST(Aggregate, SingleTrialReportMatchesRecord) {
  auto c = small_config(StrategyKind::kAmplify, 1, 8);
  c.M_override = 6;
  const auto result = run_experiment(c, {1});
  const auto& t = result.trials[0];
  const auto& r = result.report;
  EXPECT_EQ(r.n_trials, 1u);
  EXPECT_EQ(r.failure.rate, t.failed ? 1.0 : 0.0);
  EXPECT_EQ(r.boundary_crossing.rate, t.boundary_crossed ? 1.0 : 0.0);
  EXPECT_EQ(r.mixture.mean, mixture_value(t.final_A, t.final_B_sq, r.plan.L_T));
  ASSERT_EQ(r.mean_distortion.size(), t.distortions.size());
  for (std::size_t s = 0; s < t.distortions.size(); ++s) {
    EXPECT_EQ(r.mean_distortion[s], t.distortions[s]);
    EXPECT_EQ(r.max_distortion[s], t.distortions[s]);
  }
  if (t.tau) EXPECT_EQ(r.tau_histogram.at(*t.tau), 1u);
  EXPECT_LE(r.failure.wilson.lo, r.failure.rate);
  EXPECT_GE(r.failure.wilson.hi, r.failure.rate);
}

TEST(RunExperiment, SameSeedSameReport) {
  auto c = small_config(StrategyKind::kAmplify, 60, 99);
  c.M_override = 30;
  const auto a = run_experiment(c, {1});
  const auto b = run_experiment(c, {1});
  EXPECT_EQ(to_json(a.report, false).dump(), to_json(b.report, false).dump());
}

TEST(RunExperiment, WorkerCountDoesNotChangeTrials) {
  auto c = small_config(StrategyKind::kUniform, 37, 1234);
  c.M_override = 50;
  const auto one = run_experiment(c, {1});
  for (std::size_t workers : {2u, 3u, 8u}) {
    const auto many = run_experiment(c, {workers});
    ASSERT_EQ(many.trials.size(), one.trials.size());
    for (std::size_t i = 0; i < one.trials.size(); ++i) expect_identical(one.trials[i], many.trials[i]);
    EXPECT_EQ(to_json(one.report, false).dump(), to_json(many.report, false).dump());
  }
}

TEST(RunExperiment, TrialIsReproducibleInIsolation) {
  auto c = small_config(StrategyKind::kBurst, 12, 77);
  c.M_override = 20;
  const auto all = run_experiment(c, {2});
  expect_identical(all.trials[7], run_trial(c, 7, trial_seed(77, 7)));
}

TEST(RunExperiment, SmallOneDimensionalMatchesEnumeration) {
  // Smaller twin of the acceptance micro-oracle: T = 8, x0^2 = 64.
  auto c = small_config(StrategyKind::kConstant, 20000, 31);
  c.M_override = 1;
  c.plan.T = 8;
  c.plan.x0_sq = 64.0;
  const double p = oracle::m1_failure_probability(8, 0.5, 8.0, 1.0);
  EXPECT_EQ(p, 0.6484375);
  ASSERT_GT(p, 0.05);
  ASSERT_LT(p, 0.95);
  const auto r = run_experiment(c, {1}).report;
  EXPECT_LE(std::abs(r.failure.rate - p), 3.0 * std::sqrt(p * (1 - p) / 20000.0));
}

TEST(Sweep, EmptyGridIsEmpty) {
  const nlohmann::json j = {{"base", to_json(small_config(StrategyKind::kConstant, 1, 1))},
                            {"grid", nlohmann::json::object()}};
  const auto configs = expand_sweep(j);
  EXPECT_TRUE(configs.empty());
  EXPECT_TRUE(sweep(configs, {1}).empty());
}

TEST(Sweep, FailureRateNonincreasingInM) {
  auto base = small_config(StrategyKind::kAmplify, 400, 5);
  base.plan.T = 50;
  const nlohmann::json j = {{"base", to_json(base)}, {"grid", {{"M_fraction", {0.02, 0.1, 1.0}}}}};
  const auto entries = sweep(expand_sweep(j), {1});
  ASSERT_EQ(entries.size(), 3u);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ASSERT_TRUE(entries[i].report.has_value()) << entries[i].error;
  }
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const auto& small = entries[i - 1].report->failure;
    const auto& large = entries[i].report->failure;
    EXPECT_LT(entries[i - 1].report->M, entries[i].report->M);
    // Nonincreasing up to overlap of the 95% intervals.
    EXPECT_LE(large.wilson.lo, small.wilson.hi);
  }
  EXPECT_GT(entries[0].report->failure.rate, entries[2].report->failure.rate);
  EXPECT_TRUE(entries[2].report->checks.failure_rate_ok.value_or(false));
  EXPECT_FALSE(entries[0].report->checks.failure_rate_ok.has_value());
}

TEST(Sweep, FailingEntryIsIsolated) {
  auto good = small_config(StrategyKind::kConstant, 5, 1);
  good.M_override = 10;
  auto bad = good;
  bad.n_trials = 0;
  const std::vector<ExperimentConfig> configs{good, bad, good};
  const auto entries = sweep(configs, {1});
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_TRUE(entries[0].report.has_value());
  EXPECT_FALSE(entries[1].report.has_value());
  EXPECT_FALSE(entries[1].error.empty());
  EXPECT_TRUE(entries[2].report.has_value());
}

}  // namespace
