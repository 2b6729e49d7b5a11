#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqrp/harness.hpp"

namespace seqrp {

// Experiment config (unknown keys are rejected at every level):
//
// {
//   "label": "optional name",
//   "plan": {"eps": 0.5, "delta": 0.05, "c0": 1, "c_x": 1, "x0_sq": 1, "T": 200},
//   "M_override": 400,                      // optional
//   "strategy": {"kind": "amplify", "params": {"theta": 0.1, "rho": 0.1}},
//   "n_trials": 2000,
//   "seed": 42,
//   "distribution": "sphere",               // optional
//   "trace_every": 0,                       // optional
//   "recompute_every": 256,                 // optional
//   "output": {"dir": "out", "report": "report.json", "trials": "trials.csv"}
// }
//
// Sweep files hold {"base": <config>, "grid": {...}} where each grid key maps
// to a list and the cartesian product is expanded. Grid keys: eps, delta, T,
// c0, c_x, x0_sq, M (absolute M_override), M_fraction (M_override as a
// fraction of the planned M), strategy (list of kind names or strategy
// objects), seed, n_trials. An empty grid (or an empty axis) expands to no
// configs. Alternatively {"configs": [<config>, ...]}. Sweep entries are
// parsed strictly but range-checked only when run, so one bad grid point does
// not abort the rest.

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const PlanResult& plan);
nlohmann::json to_json(const ExperimentReport& report, bool include_wall_clock = true);

/// Throws ValidationError naming the path when it is missing or malformed.
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<ExperimentConfig> expand_sweep(const nlohmann::json& j);
std::vector<ExperimentConfig> load_sweep(const std::filesystem::path& path);

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_double(double x);

inline constexpr const char* kTrialsCsvHeader =
    "trial_id,failed,tau,max_distortion,final_S,final_A,final_B_sq,boundary_crossed";
inline constexpr const char* kTraceCsvHeader = "t,x_t,inner,Y,S,distortion,good,tau_set";

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials);
void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);
void write_sweep_csv(std::ostream& out, std::span<const SweepEntry> entries);

/// Writes report.json, trials.csv and trace_<id>.csv files under paths.dir.
/// Throws std::runtime_error naming the path on I/O failure.
void write_experiment_outputs(const ExperimentResult& result, const OutputPaths& paths);

}  // namespace seqrp
