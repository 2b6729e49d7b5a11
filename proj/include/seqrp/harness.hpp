#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqrp/adversary.hpp"
#include "seqrp/bounds.hpp"
#include "seqrp/sketch.hpp"
#include "seqrp/stats.hpp"

namespace seqrp {

enum class Distribution { kSphere };

struct OutputPaths {
  std::string dir = ".";
  std::string report = "report.json";
  std::string trials = "trials.csv";
};

struct ExperimentConfig {
  PlanParams plan;
  std::optional<std::size_t> M_override;
  /// strategy.c_x is ignored; trials use plan.c_x.
  StrategySpec strategy;
  std::size_t n_trials = 1;
  std::uint64_t seed = 0;
  Distribution distribution = Distribution::kSphere;
  OutputPaths outputs;
  /// Keep a full trace for trials whose id is a multiple of this; 0 disables.
  std::size_t trace_every = 0;
  std::size_t recompute_every = SketchState::kDefaultRecomputeEvery;
  std::string label;

  void validate() const;
  /// M_override if set, otherwise plan_dimension(plan).M.
  std::size_t dimension() const;
  /// Plan quantities evaluated at dimension().
  PlanResult resolved_plan() const;
  bool uses_planned_dimension() const;
};

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::optional<std::size_t> tau;
  double max_distortion = 0.0;
  double final_S = 0.0;
  double final_A = 0.0;
  double final_B_sq = 0.0;
  bool boundary_crossed = false;
  std::optional<std::size_t> crossing_step;
  /// mixture_value(A, B^2, L) at the first boundary crossing.
  double crossing_mixture = 0.0;
  bool trigger_identity_ok = true;
  /// Y_0 + A_T, which equals Y_{T ^ tau}.
  double final_Y0 = 0.0;
  /// S_{T ^ tau}.
  double stopped_S = 0.0;
  bool invalid = false;
  std::string invalid_reason;
  /// |Y_t| / S_t for t = 0..T.
  std::vector<double> distortions;
  std::vector<TraceRow> trace;
};

struct RateEstimate {
  std::size_t count = 0;
  std::size_t n = 0;
  double rate = 0.0;
  double std_error = 0.0;
  stats::Interval wilson;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct SupermartingaleMean {
  double lambda = 0.0;
  MeanEstimate estimate;
  bool ok = true;
};

/// Lambda values at which exp(lambda A - lambda^2 B^2 / 2) is averaged.
inline constexpr std::array<double, 6> kSupermartingaleLambdas = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

struct ReportChecks {
  /// Only evaluated when the planned dimension is in use.
  std::optional<bool> failure_rate_ok;
  bool boundary_ok = true;
  bool supermartingale_ok = true;
  bool mixture_ok = true;
  bool trigger_identity_ok = true;
  bool boundary_consistency_ok = true;
  bool no_invalid_trials = true;

  bool all() const noexcept;
};

struct ExperimentReport {
  ExperimentConfig config;
  PlanResult plan;
  std::size_t M = 0;
  std::size_t n_trials = 0;
  std::size_t n_valid = 0;
  std::vector<std::size_t> invalid_trials;
  RateEstimate failure;
  RateEstimate boundary_crossing;
  std::map<std::size_t, std::size_t> tau_histogram;
  std::vector<double> mean_distortion;
  std::vector<double> max_distortion;
  std::vector<SupermartingaleMean> supermartingale;
  MeanEstimate mixture;
  ReportChecks checks;
  double wall_clock_seconds = 0.0;
};

struct ExperimentResult {
  ExperimentReport report;
  std::vector<TrialRecord> trials;
};

struct RunOptions {
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 0;
};

/// Per-trial seed from the master seed; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial_id) noexcept;

/// Simulates t = 0..T. Per step, x_t is chosen from the history first and
/// only then is z_t drawn. Deterministic given (config, trial_id, seed).
TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_id, std::uint64_t seed);

/// Deterministic fold of trial records in trial-id order.
ExperimentReport aggregate(const ExperimentConfig& config, std::span<const TrialRecord> trials);

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct SweepEntry {
  ExperimentConfig config;
  std::optional<ExperimentReport> report;
  std::string error;
};

/// Runs each config independently; a failing config records its error and
/// does not stop the others.
std::vector<SweepEntry> sweep(std::span<const ExperimentConfig> configs,
                              const RunOptions& options = {});

}  // namespace seqrp
