#include "seqrp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "seqrp/error.hpp"

namespace seqrp {

namespace {

constexpr std::uint64_t kProjectionStream = 1;
constexpr std::uint64_t kStrategyStream = 2;

// Enforces the per-step order: decide x_t, then draw z_t.
class CausalGuard {
 public:
  void decided() {
    if (x_pending_) throw CausalityError("x_t decided twice without drawing z_t");
    x_pending_ = true;
  }
  void drawing() {
    if (!x_pending_) throw CausalityError("z_t drawn before x_t was decided");
    x_pending_ = false;
  }

 private:
  bool x_pending_ = false;
};

bool finite_state(const SketchState& st, const BoundAccumulator& acc) {
  return std::isfinite(st.Y()) && std::isfinite(st.S()) && std::isfinite(acc.A()) &&
         std::isfinite(acc.B_sq());
}

RateEstimate rate_of(std::size_t count, std::size_t n) {
  RateEstimate r;
  r.count = count;
  r.n = n;
  r.rate = n == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n);
  r.std_error = stats::binomial_se(r.rate, n);
  r.wilson = stats::wilson_interval(count, n);
  return r;
}

MeanEstimate mean_of(const stats::RunningMoments& m) {
  return {m.mean(), m.std_error(), m.count()};
}

}  // namespace

void ExperimentConfig::validate() const {
  plan.validate();
  strategy.validate();
  detail::require(n_trials >= 1, "config: n_trials must be >= 1");
  if (M_override) detail::require(*M_override >= 1, "config: M_override must be >= 1");
}

std::size_t ExperimentConfig::dimension() const {
  return M_override ? *M_override : plan_dimension(plan).M;
}

PlanResult ExperimentConfig::resolved_plan() const { return plan_for_dimension(plan, dimension()); }

bool ExperimentConfig::uses_planned_dimension() const {
  return dimension() >= plan_dimension(plan).M;
}

bool ReportChecks::all() const noexcept {
  return failure_rate_ok.value_or(true) && boundary_ok && supermartingale_ok && mixture_ok &&
         trigger_identity_ok && boundary_consistency_ok && no_invalid_trials;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial_id) noexcept {
  return derive_seed(master, trial_id);
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_id, std::uint64_t seed) {
  config.validate();
  const PlanParams& p = config.plan;
  const PlanResult plan = config.resolved_plan();
  const std::size_t M = plan.M;
  StrategySpec strategy = config.strategy;
  strategy.c_x = p.c_x;

  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.seed = seed;
  const bool keep_trace = config.trace_every != 0 && trial_id % config.trace_every == 0;

  Rng projection_rng = make_rng(seed, 0, kProjectionStream);
  Rng strategy_rng = make_rng(seed, 0, kStrategyStream);

  const double x0 = std::sqrt(p.x0_sq);
  ProjectionVector z0 = sample_sphere(M, projection_rng);
  SketchState st = SketchState::init(x0, z0.coords(), p.eps, config.recompute_every);
  BoundAccumulator acc(plan.L_T, M, p.c0, p.eps);
  const double Y0 = st.Y();

  std::vector<double> xs{x0};
  std::vector<ProjectionVector> zs{std::move(z0)};
  xs.reserve(p.T + 1);
  zs.reserve(p.T + 1);
  std::vector<bool> goods{st.good()};
  rec.distortions.reserve(p.T + 1);
  rec.distortions.push_back(st.distortion());
  if (keep_trace) rec.trace.push_back(st.trace_row(x0, 0.0));
  rec.stopped_S = st.S();

  CausalGuard guard;
  try {
    for (std::size_t t = 1; t <= p.T; ++t) {
      const History history{t, xs, zs, st};
      const double x = next_x(strategy, history, strategy_rng);
      guard.decided();
      if (!std::isfinite(x)) throw NumericError("strategy emitted a non-finite x_t");
      if (x * x > p.c_x) throw std::logic_error("strategy violated x_t^2 <= c_x");

      guard.drawing();
      ProjectionVector z = sample_sphere(M, projection_rng);

      const double S_prev = st.S();
      const bool stopped = st.stopped();
      const StepOutcome out = st.update(x, z);
      acc.accumulate(out, x, S_prev, stopped);
      if (!finite_state(st, acc)) {
        throw NumericError("non-finite sketch state at t = " + std::to_string(t));
      }
      if (!stopped) rec.stopped_S = st.S();

      goods.push_back(out.good);
      rec.distortions.push_back(st.distortion());
      if (keep_trace) rec.trace.push_back(st.trace_row(x, out.inner));

      if (!rec.boundary_crossed && std::abs(acc.A()) > boundary(acc.B_sq(), plan.L_T, p.delta)) {
        rec.boundary_crossed = true;
        rec.crossing_step = t;
        rec.crossing_mixture = mixture_value(acc.A(), acc.B_sq(), plan.L_T);
      }

      xs.push_back(x);
      zs.push_back(std::move(z));
    }
  } catch (const NumericError& e) {
    rec.invalid = true;
    rec.invalid_reason = e.what();
  }

  rec.tau = st.tau();
  rec.failed = rec.tau.has_value();
  rec.max_distortion = *std::max_element(rec.distortions.begin(), rec.distortions.end());
  rec.final_S = st.S();
  rec.final_A = acc.A();
  rec.final_B_sq = acc.B_sq();
  rec.final_Y0 = Y0 + acc.A();
  rec.trigger_identity_ok = check_trigger_identity(goods);
  if (!rec.trigger_identity_ok) {
    throw std::logic_error("trigger identity violated in trial " + std::to_string(trial_id));
  }
  return rec;
}

ExperimentReport aggregate(const ExperimentConfig& config, std::span<const TrialRecord> trials) {
  ExperimentReport r;
  r.config = config;
  r.plan = config.resolved_plan();
  r.M = r.plan.M;
  r.n_trials = trials.size();
  const double delta = config.plan.delta;
  const double L = r.plan.L_T;

  std::size_t failures = 0;
  std::size_t crossings = 0;
  std::vector<stats::RunningMoments> sm(kSupermartingaleLambdas.size());
  stats::RunningMoments mixture;
  const std::size_t horizon = config.plan.T + 1;
  std::vector<double> dist_sum(horizon, 0.0);
  r.max_distortion.assign(horizon, 0.0);

  for (const TrialRecord& t : trials) {
    r.checks.trigger_identity_ok = r.checks.trigger_identity_ok && t.trigger_identity_ok;
    if (t.invalid) {
      r.invalid_trials.push_back(t.trial_id);
      continue;
    }
    ++r.n_valid;
    if (t.failed) {
      ++failures;
      ++r.tau_histogram[*t.tau];
    }
    if (t.boundary_crossed) {
      ++crossings;
      if (!(t.crossing_mixture >= (1.0 / delta) * (1.0 - 1e-9))) {
        r.checks.boundary_consistency_ok = false;
      }
    }
    for (std::size_t i = 0; i < kSupermartingaleLambdas.size(); ++i) {
      sm[i].push(exponential_supermartingale(t.final_A, t.final_B_sq, kSupermartingaleLambdas[i]));
    }
    mixture.push(mixture_value(t.final_A, t.final_B_sq, L));
    for (std::size_t s = 0; s < horizon && s < t.distortions.size(); ++s) {
      dist_sum[s] += t.distortions[s];
      r.max_distortion[s] = std::max(r.max_distortion[s], t.distortions[s]);
    }
  }

  r.failure = rate_of(failures, r.n_valid);
  r.boundary_crossing = rate_of(crossings, r.n_valid);
  r.mean_distortion.resize(horizon);
  for (std::size_t s = 0; s < horizon; ++s) {
    r.mean_distortion[s] = r.n_valid == 0 ? 0.0 : dist_sum[s] / static_cast<double>(r.n_valid);
  }
  for (std::size_t i = 0; i < kSupermartingaleLambdas.size(); ++i) {
    SupermartingaleMean m{kSupermartingaleLambdas[i], mean_of(sm[i]), true};
    m.ok = m.estimate.mean <= 1.0 + 3.0 * m.estimate.std_error;
    r.checks.supermartingale_ok = r.checks.supermartingale_ok && m.ok;
    r.supermartingale.push_back(m);
  }
  r.mixture = mean_of(mixture);
  r.checks.mixture_ok = r.mixture.mean <= 1.0 + 3.0 * r.mixture.std_error;

  const double slack = 3.0 * stats::binomial_se(delta, r.n_valid);
  r.checks.boundary_ok = r.boundary_crossing.rate <= delta + slack;
  if (config.uses_planned_dimension()) r.checks.failure_rate_ok = r.failure.rate <= delta + slack;
  r.checks.no_invalid_trials = r.invalid_trials.empty();
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::size_t workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.n_trials);

  ExperimentResult result;
  result.trials.resize(config.n_trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.n_trials) return;
      try {
        result.trials[i] = run_trial(config, i, trial_seed(config.seed, i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(config.n_trials);
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  result.report = aggregate(config, result.trials);
  result.report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<SweepEntry> sweep(std::span<const ExperimentConfig> configs, const RunOptions& options) {
  std::vector<SweepEntry> out;
  out.reserve(configs.size());
  for (const ExperimentConfig& c : configs) {
    SweepEntry e;
    e.config = c;
    try {
      e.report = run_experiment(c, options).report;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace seqrp
