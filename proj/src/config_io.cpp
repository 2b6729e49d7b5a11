#include "seqrp/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "seqrp/error.hpp"

namespace seqrp {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + ": expected a JSON object");
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) {
      throw ValidationError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

const json& required(const json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) {
    throw ValidationError(std::string(where) + ": missing key '" + std::string(key) + "'");
  }
  return *it;
}

template <typename T>
T get_as(const json& j, std::string_view key, std::string_view where) {
  try {
    return required(j, key, where).template get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(where) + "." + std::string(key) + ": " + e.what());
  }
}

std::size_t get_count(const json& j, std::string_view key, std::string_view where) {
  const json& v = required(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(std::string(where) + "." + std::string(key) +
                          ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

PlanParams plan_from_json(const json& j) {
  require_object(j, "plan");
  reject_unknown_keys(j, {"eps", "delta", "c0", "c_x", "x0_sq", "T"}, "plan");
  PlanParams p;
  p.eps = get_as<double>(j, "eps", "plan");
  p.delta = get_as<double>(j, "delta", "plan");
  if (j.contains("c0")) p.c0 = get_as<double>(j, "c0", "plan");
  if (j.contains("c_x")) p.c_x = get_as<double>(j, "c_x", "plan");
  if (j.contains("x0_sq")) p.x0_sq = get_as<double>(j, "x0_sq", "plan");
  p.T = get_count(j, "T", "plan");
  return p;
}

StrategySpec strategy_from_json(const json& j) {
  StrategySpec s;
  if (j.is_string()) {
    s.kind = parse_strategy_kind(j.get<std::string>());
    return s;
  }
  require_object(j, "strategy");
  reject_unknown_keys(j, {"kind", "params"}, "strategy");
  s.kind = parse_strategy_kind(get_as<std::string>(j, "kind", "strategy"));
  if (!j.contains("params")) return s;
  const json& params = j.at("params");
  require_object(params, "strategy.params");
  switch (s.kind) {
    case StrategyKind::kConstant: reject_unknown_keys(params, {"value"}, "strategy.params"); break;
    case StrategyKind::kAmplify: reject_unknown_keys(params, {"theta", "rho"}, "strategy.params"); break;
    case StrategyKind::kBurst: reject_unknown_keys(params, {"k", "rho"}, "strategy.params"); break;
    case StrategyKind::kZeroAfter: reject_unknown_keys(params, {"k"}, "strategy.params"); break;
    case StrategyKind::kUniform:
    case StrategyKind::kAlternating: reject_unknown_keys(params, {}, "strategy.params"); break;
  }
  if (params.contains("value")) s.value = get_as<double>(params, "value", "strategy.params");
  if (params.contains("theta")) s.theta = get_as<double>(params, "theta", "strategy.params");
  if (params.contains("rho")) s.rho = get_as<double>(params, "rho", "strategy.params");
  if (params.contains("k")) s.k = get_count(params, "k", "strategy.params");
  return s;
}

json strategy_to_json(const StrategySpec& s) {
  json params = json::object();
  switch (s.kind) {
    case StrategyKind::kConstant:
      if (!std::isnan(s.value)) params["value"] = s.value;
      break;
    case StrategyKind::kAmplify:
      params["theta"] = s.theta;
      params["rho"] = s.rho;
      break;
    case StrategyKind::kBurst:
      params["k"] = s.k;
      params["rho"] = s.rho;
      break;
    case StrategyKind::kZeroAfter: params["k"] = s.k; break;
    case StrategyKind::kUniform:
    case StrategyKind::kAlternating: break;
  }
  return {{"kind", std::string(to_string(s.kind))}, {"params", params}};
}

json rate_to_json(const RateEstimate& r) {
  return {{"count", r.count},         {"n", r.n},
          {"rate", r.rate},           {"std_error", r.std_error},
          {"wilson_lo", r.wilson.lo}, {"wilson_hi", r.wilson.hi}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

bool plan_is_valid(const PlanParams& p) {
  try {
    p.validate();
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

// Structural parse only; range checks are left to ExperimentConfig::validate.
ExperimentConfig parse_config(const json& j) {
  require_object(j, "config");
  reject_unknown_keys(j,
                      {"label", "plan", "M_override", "strategy", "n_trials", "seed",
                       "distribution", "trace_every", "recompute_every", "output"},
                      "config");
  ExperimentConfig c;
  if (j.contains("label")) c.label = get_as<std::string>(j, "label", "config");
  c.plan = plan_from_json(required(j, "plan", "config"));
  if (j.contains("M_override") && !j.at("M_override").is_null()) {
    c.M_override = get_count(j, "M_override", "config");
  }
  c.strategy = strategy_from_json(required(j, "strategy", "config"));
  c.strategy.c_x = c.plan.c_x;
  c.n_trials = get_count(j, "n_trials", "config");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", "config");
  if (j.contains("distribution")) {
    const auto d = get_as<std::string>(j, "distribution", "config");
    if (d != "sphere") throw ValidationError("config.distribution: unsupported '" + d + "'");
  }
  if (j.contains("trace_every")) c.trace_every = get_count(j, "trace_every", "config");
  if (j.contains("recompute_every")) c.recompute_every = get_count(j, "recompute_every", "config");
  if (j.contains("output")) {
    const json& o = j.at("output");
    require_object(o, "output");
    reject_unknown_keys(o, {"dir", "report", "trials"}, "output");
    if (o.contains("dir")) c.outputs.dir = get_as<std::string>(o, "dir", "output");
    if (o.contains("report")) c.outputs.report = get_as<std::string>(o, "report", "output");
    if (o.contains("trials")) c.outputs.trials = get_as<std::string>(o, "trials", "output");
  }
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c = parse_config(j);
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = {
      {"plan",
       {{"eps", c.plan.eps},
        {"delta", c.plan.delta},
        {"c0", c.plan.c0},
        {"c_x", c.plan.c_x},
        {"x0_sq", c.plan.x0_sq},
        {"T", c.plan.T}}},
      {"strategy", strategy_to_json(c.strategy)},
      {"n_trials", c.n_trials},
      {"seed", c.seed},
      {"distribution", "sphere"},
      {"trace_every", c.trace_every},
      {"recompute_every", c.recompute_every},
      {"output", {{"dir", c.outputs.dir}, {"report", c.outputs.report}, {"trials", c.outputs.trials}}},
  };
  if (!c.label.empty()) j["label"] = c.label;
  j["M_override"] = c.M_override ? json(*c.M_override) : json(nullptr);
  return j;
}

json to_json(const PlanResult& plan) {
  return {{"M", plan.M},
          {"L_T", plan.L_T},
          {"B_sq_bound", plan.B_sq_as_bound},
          {"dimension_rhs", plan.dimension_rhs}};
}

json to_json(const ExperimentReport& r, bool include_wall_clock) {
  json histogram = json::object();
  for (const auto& [tau, count] : r.tau_histogram) histogram[std::to_string(tau)] = count;
  json sm = json::array();
  for (const auto& m : r.supermartingale) {
    sm.push_back({{"lambda", m.lambda},
                  {"mean", m.estimate.mean},
                  {"std_error", m.estimate.std_error},
                  {"n", m.estimate.n},
                  {"ok", m.ok}});
  }
  json checks = {
      {"boundary_ok", r.checks.boundary_ok},
      {"supermartingale_ok", r.checks.supermartingale_ok},
      {"mixture_ok", r.checks.mixture_ok},
      {"trigger_identity_ok", r.checks.trigger_identity_ok},
      {"boundary_consistency_ok", r.checks.boundary_consistency_ok},
      {"no_invalid_trials", r.checks.no_invalid_trials},
      {"all", r.checks.all()},
  };
  checks["failure_rate_ok"] = r.checks.failure_rate_ok ? json(*r.checks.failure_rate_ok) : json(nullptr);

  json j = {
      {"config", to_json(r.config)},
      {"M", r.M},
      {"plan", to_json(r.plan)},
      {"planned_dimension", r.config.uses_planned_dimension()},
      {"n_trials", r.n_trials},
      {"n_valid", r.n_valid},
      {"invalid_trials", r.invalid_trials},
      {"failure_rate", rate_to_json(r.failure)},
      {"boundary_crossing_rate", rate_to_json(r.boundary_crossing)},
      {"tau_histogram", histogram},
      {"distortion_profile", {{"mean", r.mean_distortion}, {"max", r.max_distortion}}},
      {"supermartingale", sm},
      {"mixture", {{"mean", r.mixture.mean}, {"std_error", r.mixture.std_error}, {"n", r.mixture.n}, {"ok", r.checks.mixture_ok}}},
      {"checks", checks},
  };
  if (include_wall_clock) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return config_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError("invalid config '" + path.string() + "': " + e.what());
  }
}

std::vector<ExperimentConfig> expand_sweep(const json& j) {
  require_object(j, "sweep");
  reject_unknown_keys(j, {"base", "grid", "configs"}, "sweep");
  std::vector<ExperimentConfig> out;
  if (j.contains("configs")) {
    for (const json& c : j.at("configs")) out.push_back(parse_config(c));
  }
  if (!j.contains("base")) return out;

  const json& base = j.at("base");
  const json grid = j.contains("grid") ? j.at("grid") : json::object();
  require_object(grid, "sweep.grid");
  reject_unknown_keys(grid,
                      {"eps", "delta", "T", "c0", "c_x", "x0_sq", "M", "M_fraction", "strategy",
                       "seed", "n_trials"},
                      "sweep.grid");
  std::vector<std::pair<std::string, json>> axes;
  for (const auto& item : grid.items()) {
    if (!item.value().is_array()) {
      throw ValidationError("sweep.grid." + item.key() + ": expected a list");
    }
    axes.emplace_back(item.key(), item.value());
  }
  // An empty grid, or any empty axis, expands to nothing.
  if (axes.empty()) return out;
  for (const auto& axis : axes) {
    if (axis.second.empty()) return out;
  }

  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    json cfg = base;
    std::optional<double> m_fraction;
    std::string label = cfg.value("label", std::string());
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [key, values] = axes[a];
      const json& v = values[idx[a]];
      if (key == "M") {
        cfg["M_override"] = v;
      } else if (key == "M_fraction") {
        m_fraction = v.get<double>();
      } else if (key == "strategy" || key == "seed" || key == "n_trials") {
        cfg[key] = v;
      } else {
        cfg["plan"][key] = v;
      }
      if (!label.empty()) label += ",";
      label += key + "=" + (v.is_object() ? v.value("kind", std::string("?")) : v.is_string() ? v.get<std::string>() : v.dump());
    }
    cfg["label"] = label;
    ExperimentConfig c = parse_config(cfg);
    if (m_fraction) {
      detail::require(*m_fraction > 0.0, "sweep.grid.M_fraction: values must be positive");
      // An out-of-range plan has no planned M; it fails when the entry runs.
      if (plan_is_valid(c.plan)) {
        const double planned = static_cast<double>(plan_dimension(c.plan).M);
        c.M_override =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(*m_fraction * planned)));
      }
    }
    out.push_back(std::move(c));

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

std::vector<ExperimentConfig> load_sweep(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return expand_sweep(j);
  } catch (const ValidationError& e) {
    throw ValidationError("invalid sweep '" + path.string() + "': " + e.what());
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials) {
  out << kTrialsCsvHeader << '\n';
  for (const TrialRecord& t : trials) {
    out << t.trial_id << ',' << (t.failed ? 1 : 0) << ',';
    if (t.tau) out << *t.tau;
    out << ',' << format_double(t.max_distortion) << ',' << format_double(t.final_S) << ','
        << format_double(t.final_A) << ',' << format_double(t.final_B_sq) << ','
        << (t.boundary_crossed ? 1 : 0) << '\n';
  }
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << kTraceCsvHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.t << ',' << format_double(r.x) << ',' << format_double(r.inner) << ','
        << format_double(r.Y) << ',' << format_double(r.S) << ',' << format_double(r.distortion)
        << ',' << (r.good ? 1 : 0) << ',' << (r.tau_set ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepEntry> entries) {
  out << "label,strategy,eps,delta,T,c0,c_x,x0_sq,M,planned_M,n_trials,n_valid,failure_rate,"
         "failure_lo,failure_hi,boundary_rate,boundary_lo,boundary_hi,mixture_mean,"
         "max_distortion,error\n";
  for (const SweepEntry& e : entries) {
    const ExperimentConfig& c = e.config;
    // Labels are generated from grid keys; strip characters that would split the row.
    std::string label = c.label;
    for (char& ch : label) {
      if (ch == ',' || ch == '"' || ch == '\n') ch = ';';
    }
    out << label << ',' << to_string(c.strategy.kind) << ',' << format_double(c.plan.eps) << ','
        << format_double(c.plan.delta) << ',' << c.plan.T << ',' << format_double(c.plan.c0)
        << ',' << format_double(c.plan.c_x) << ',' << format_double(c.plan.x0_sq) << ',';
    if (e.report) {
      const ExperimentReport& r = *e.report;
      double max_d = 0.0;
      for (double d : r.max_distortion) max_d = std::max(max_d, d);
      out << r.M << ',' << plan_dimension(c.plan).M << ',' << r.n_trials << ',' << r.n_valid << ','
          << format_double(r.failure.rate) << ',' << format_double(r.failure.wilson.lo) << ','
          << format_double(r.failure.wilson.hi) << ',' << format_double(r.boundary_crossing.rate)
          << ',' << format_double(r.boundary_crossing.wilson.lo) << ','
          << format_double(r.boundary_crossing.wilson.hi) << ',' << format_double(r.mixture.mean)
          << ',' << format_double(max_d) << ",\n";
    } else {
      std::string err = e.error;
      for (char& ch : err) {
        if (ch == ',' || ch == '"' || ch == '\n') ch = ';';
      }
      out << ",,,,,,,,,,,," << err << '\n';
    }
  }
}

void write_experiment_outputs(const ExperimentResult& result, const OutputPaths& paths) {
  const std::filesystem::path dir(paths.dir.empty() ? "." : paths.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  {
    const auto path = dir / paths.report;
    auto out = open_output(path);
    out << to_json(result.report).dump(2) << '\n';
    finish_output(out, path);
  }
  {
    const auto path = dir / paths.trials;
    auto out = open_output(path);
    write_trials_csv(out, result.trials);
    finish_output(out, path);
  }
  for (const TrialRecord& t : result.trials) {
    if (t.trace.empty()) continue;
    const auto path = dir / ("trace_" + std::to_string(t.trial_id) + ".csv");
    auto out = open_output(path);
    write_trace_csv(out, t.trace);
    finish_output(out, path);
  }
}

}  // namespace seqrp
