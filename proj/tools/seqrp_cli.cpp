// seqrp: command-line front end.
//
//   seqrp plan --eps 0.5 --delta 0.01 --cx 1 --x0sq 1 --T 100 --c0 1
//   seqrp simulate --config experiment.json [--out DIR] [--seed N] [--workers N]
//   seqrp sweep --config sweep.json [--out DIR] [--workers N]
//   seqrp check-dist [--M 3,25] [--n 100000] [--n-mgf 1000000] [--seed N]
//   seqrp bound --A 0 --Bsq 0 --L 1 --delta 0.05
//
// Structured results go to stdout as JSON; logs go to stderr.
// Exit codes: 0 ok, 1 validation error, 2 runtime error, 3 statistical check failed.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seqrp/bounds.hpp"
#include "seqrp/config_io.hpp"
#include "seqrp/distributions.hpp"
#include "seqrp/error.hpp"
#include "seqrp/harness.hpp"

#ifndef SEQRP_VERSION
#define SEQRP_VERSION "0.0.0"
#endif
#ifndef SEQRP_GIT_REV
#define SEQRP_GIT_REV "unknown"
#endif

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheckFailed = 3;

int verbosity = 0;

void log(int level, const std::string& msg) {
  if (verbosity >= level) std::cerr << "[seqrp] " << msg << '\n';
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_plan(const seqrp::PlanParams& p) {
  const seqrp::PlanResult r = seqrp::plan_dimension(p);
  json j = seqrp::to_json(r);
  j["baseline_M"] = seqrp::union_bound_baseline(p.eps, p.delta, p.T, p.c0);
  emit(j);
  return kExitOk;
}

int cmd_bound(double A, double B_sq, double L, double delta) {
  const double b = seqrp::boundary(B_sq, L, delta);
  const double log_m = seqrp::log_mixture_value(A, B_sq, L);
  emit({{"A", A},
        {"B_sq", B_sq},
        {"L", L},
        {"delta", delta},
        {"boundary", b},
        {"mixture_value", std::exp(log_m)},
        {"log_mixture_value", log_m},
        {"crossed", std::abs(A) > b}});
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
};

int cmd_simulate(const SimulateArgs& args) {
  seqrp::ExperimentConfig config = seqrp::load_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (!args.out.empty()) config.outputs.dir = args.out;
  log(1, "simulate: M = " + std::to_string(config.dimension()) + ", n_trials = " +
             std::to_string(config.n_trials));

  const seqrp::ExperimentResult result = seqrp::run_experiment(config, {args.workers});
  seqrp::write_experiment_outputs(result, config.outputs);
  log(1, "wall clock " + std::to_string(result.report.wall_clock_seconds) + " s");
  emit(seqrp::to_json(result.report, /*include_wall_clock=*/false));

  if (!result.report.invalid_trials.empty()) {
    std::cerr << "seqrp: " << result.report.invalid_trials.size()
              << " trial(s) produced non-finite state\n";
    return kExitRuntime;
  }
  return result.report.checks.all() ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const SimulateArgs& args) {
  std::vector<seqrp::ExperimentConfig> configs = seqrp::load_sweep(args.config);
  const std::filesystem::path dir(args.out.empty() ? std::string(".") : args.out);
  std::filesystem::create_directories(dir);
  log(1, "sweep: " + std::to_string(configs.size()) + " configuration(s)");

  const auto entries = seqrp::sweep(configs, {args.workers});
  json reports = json::array();
  bool any_error = false;
  for (const auto& e : entries) {
    if (e.report) {
      reports.push_back(seqrp::to_json(*e.report, false));
    } else {
      any_error = true;
      reports.push_back({{"config", seqrp::to_json(e.config)}, {"error", e.error}});
      std::cerr << "seqrp: sweep entry '" << e.config.label << "' failed: " << e.error << '\n';
    }
  }
  const auto csv_path = dir / "sweep.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write '" + csv_path.string() + "'");
  seqrp::write_sweep_csv(csv, entries);
  const auto json_path = dir / "sweep.json";
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw std::runtime_error("cannot write '" + json_path.string() + "'");
  js << reports.dump(2) << '\n';
  emit(reports);
  return any_error ? kExitRuntime : kExitOk;
}

struct CheckDistArgs {
  std::vector<std::size_t> dims{3, 25};
  std::size_t n = 100000;
  std::size_t n_mgf = 1000000;
  std::uint64_t seed = 20240601;
};

json mgf_to_json(const seqrp::MgfReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"lambda", row.lambda},
                    {"empirical", row.empirical},
                    {"std_error", row.std_error},
                    {"bound", row.bound},
                    {"pass", row.pass}});
  }
  return {{"n_samples", r.n_samples}, {"violations", r.violations()}, {"rows", rows}};
}

int cmd_check_dist(const CheckDistArgs& args) {
  const std::vector<double> lambdas = seqrp::default_lambda_grid();
  bool pass = true;
  std::uint64_t stream = 0;
  json inner = json::array();
  json sub = json::array();
  for (std::size_t M : args.dims) {
    const auto e1 = seqrp::ProjectionVector::basis(M, 0);
    if (M >= 2) {
      seqrp::Rng rng = seqrp::make_rng(args.seed, stream++);
      const auto fit = seqrp::check_inner_product_law(M, e1.coords(), args.n, rng);
      pass = pass && fit.ok();
      inner.push_back({{"M", M},
                       {"n_samples", fit.n_samples},
                       {"ks_statistic", fit.ks_statistic},
                       {"p_value", fit.p_value},
                       {"significance", fit.significance},
                       {"rejected", fit.rejected},
                       {"sample_variance", fit.sample_variance},
                       {"variance_se", fit.variance_se},
                       {"target_variance", fit.target_variance},
                       {"variance_ok", fit.variance_ok},
                       {"pass", fit.ok()}});
    }
    seqrp::Rng rng = seqrp::make_rng(args.seed, stream++);
    const auto r = seqrp::check_subgaussian_mgf(
        [M](seqrp::Rng& g) { return seqrp::sample_sphere(M, g); }, seqrp::SubGaussianSpec::sphere(M),
        e1.coords(), lambdas, args.n_mgf, rng);
    pass = pass && r.ok();
    json j = mgf_to_json(r);
    j["M"] = M;
    sub.push_back(j);
  }

  json beta = json::array();
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {12, 12}}) {
    seqrp::Rng rng = seqrp::make_rng(args.seed, stream++);
    const auto r = seqrp::check_beta_mgf(seqrp::BetaLawParams::make(a, b), lambdas, args.n_mgf, rng);
    pass = pass && r.ok();
    json j = mgf_to_json(r);
    j["alpha"] = a;
    j["beta"] = b;
    beta.push_back(j);
  }

  emit({{"pass", pass}, {"inner_product_law", inner}, {"subgaussian_mgf", sub}, {"beta_mgf", beta}});
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential random projection: planner, simulator and bound checks", "seqrp"};
  app.set_version_flag("--version", std::string("seqrp ") + SEQRP_VERSION + " (" + SEQRP_GIT_REV + ")");
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", verbosity, "Increase log verbosity on stderr");

  seqrp::PlanParams plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan the sketch dimension M and mixture scale L_T");
  plan_cmd->add_option("--eps", plan.eps, "Distortion target in (0, 1)")->required();
  plan_cmd->add_option("--delta", plan.delta, "Failure probability in (0, 1)")->required();
  plan_cmd->add_option("--c0", plan.c0, "Sub-Gaussian scale of the projections")->capture_default_str();
  plan_cmd->add_option("--cx", plan.c_x, "Square bound on x_t")->capture_default_str();
  plan_cmd->add_option("--x0sq", plan.x0_sq, "x_0 squared")->capture_default_str();
  plan_cmd->add_option("--T", plan.T, "Horizon")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
  sim_cmd->add_option("--config", sim.config, "Experiment config (JSON)")->required();
  sim_cmd->add_option("--out", sim.out, "Output directory (overrides config)");
  sim_cmd->add_option("--seed", sim.seed, "Master seed (overrides config)");
  sim_cmd->add_option("--workers", sim.workers, "Worker threads (0 = all cores)")->capture_default_str();

  SimulateArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid of experiments");
  sweep_cmd->add_option("--config", sw.config, "Sweep file (JSON)")->required();
  sweep_cmd->add_option("--out", sw.out, "Output directory");
  sweep_cmd->add_option("--workers", sw.workers, "Worker threads (0 = all cores)")->capture_default_str();

  CheckDistArgs cd;
  auto* cd_cmd = app.add_subcommand("check-dist", "Check sphere sampling laws and MGF bounds");
  cd_cmd->add_option("--M", cd.dims, "Dimensions to check")->delimiter(',')->capture_default_str();
  cd_cmd->add_option("--n", cd.n, "Samples for the goodness-of-fit test")->capture_default_str();
  cd_cmd->add_option("--n-mgf", cd.n_mgf, "Samples per MGF check")->capture_default_str();
  cd_cmd->add_option("--seed", cd.seed, "Seed")->capture_default_str();

  double A = 0.0, B_sq = 0.0, L = 1.0, delta = 0.05;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate the anytime boundary and mixture value");
  bound_cmd->add_option("--A", A, "Stopped sum A_t")->required();
  bound_cmd->add_option("--Bsq", B_sq, "Variance proxy B_t^2")->required();
  bound_cmd->add_option("--L", L, "Mixture precision L")->required();
  bound_cmd->add_option("--delta", delta, "Confidence level in (0, 1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "seqrp: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*cd_cmd) return cmd_check_dist(cd);
    if (*bound_cmd) return cmd_bound(A, B_sq, L, delta);
  } catch (const seqrp::ValidationError& e) {
    std::cerr << "seqrp: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "seqrp: invalid JSON input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "seqrp: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}
