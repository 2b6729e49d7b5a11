#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seqrp/bounds.hpp"
#include "seqrp/config_io.hpp"
#include "seqrp/distributions.hpp"
#include "seqrp/error.hpp"
#include "seqrp/harness.hpp"
#include "seqrp/sketch.hpp"

namespace py = pybind11;
using namespace seqrp;

namespace {

PlanParams make_plan(double eps, double delta, std::size_t T, double c0, double c_x, double x0_sq) {
  PlanParams p;
  p.eps = eps;
  p.delta = delta;
  p.T = T;
  p.c0 = c0;
  p.c_x = c_x;
  p.x0_sq = x0_sq;
  return p;
}

py::dict plan_to_dict(const PlanResult& r) {
  py::dict d;
  d["M"] = r.M;
  d["L_T"] = r.L_T;
  d["B_sq_bound"] = r.B_sq_as_bound;
  d["dimension_rhs"] = r.dimension_rhs;
  return d;
}

py::dict mgf_to_dict(const MgfReport& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["lambda"] = row.lambda;
    d["empirical"] = row.empirical;
    d["std_error"] = row.std_error;
    d["bound"] = row.bound;
    d["pass"] = row.pass;
    rows.append(d);
  }
  py::dict d;
  d["n_samples"] = r.n_samples;
  d["violations"] = r.violations();
  d["rows"] = rows;
  return d;
}

py::dict outcome_to_dict(const StepOutcome& o) {
  py::dict d;
  d["t"] = o.t;
  d["y_increment"] = o.y_increment;
  d["inner"] = o.inner;
  d["good"] = o.good;
  d["stopped_increment"] = o.stopped_increment;
  d["stopped"] = o.stopped;
  return d;
}

// Python-facing sketch: owns its state, accepts plain sequences for z.
class PySketch {
 public:
  PySketch(double x0, const std::vector<double>& z0, double eps, std::size_t recompute_every)
      : st_(SketchState::init(x0, z0, eps, recompute_every)) {}

  py::dict update(double x, const std::vector<double>& z) {
    return outcome_to_dict(st_.update(x, ProjectionVector(z)));
  }

  const SketchState& state() const { return st_; }

 private:
  SketchState st_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sequential random projection: planner, sketch, bounds and Monte Carlo harness";

  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def(
      "plan_dimension",
      [](double eps, double delta, std::size_t T, double c0, double c_x, double x0_sq) {
        return plan_to_dict(plan_dimension(make_plan(eps, delta, T, c0, c_x, x0_sq)));
      },
      py::arg("eps"), py::arg("delta"), py::arg("T"), py::arg("c0") = 1.0, py::arg("c_x") = 1.0,
      py::arg("x0_sq") = 1.0, "Smallest sketch dimension for the given target, with L_T and the B^2 bound.");
  m.def("required_dimension", &required_dimension, py::arg("eps"), py::arg("c0"), py::arg("log_budget"));
  m.def("union_bound_baseline", &union_bound_baseline, py::arg("eps"), py::arg("delta"), py::arg("T"),
        py::arg("c0") = 1.0, "Dimension for a non-adaptive stream with a union bound over 0..T.");
  m.def("boundary", &boundary, py::arg("B_sq"), py::arg("L"), py::arg("delta"));
  m.def("mixture_value", &mixture_value, py::arg("A"), py::arg("B_sq"), py::arg("L"));
  m.def("log_mixture_value", &log_mixture_value, py::arg("A"), py::arg("B_sq"), py::arg("L"));
  m.def("exponential_supermartingale", &exponential_supermartingale, py::arg("A"), py::arg("B_sq"),
        py::arg("lam"));

  m.def(
      "sample_sphere",
      [](std::size_t M, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        const auto z = sample_sphere(M, rng);
        return std::vector<double>(z.coords().begin(), z.coords().end());
      },
      py::arg("M"), py::arg("seed"), "One uniform draw from the unit sphere in R^M.");
  m.def(
      "inner_product_law",
      [](std::size_t M) {
        const auto law = inner_product_law(M);
        py::dict d;
        d["alpha"] = law.beta.alpha;
        d["beta"] = law.beta.beta;
        d["variance"] = law.variance();
        return d;
      },
      py::arg("M"));
  m.def(
      "inner_product_cdf", [](std::size_t M, double x) { return inner_product_law(M).cdf(x); },
      py::arg("M"), py::arg("x"));
  m.def(
      "check_beta_mgf",
      [](double alpha, double beta, const std::vector<double>& lambdas, std::size_t n, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        return mgf_to_dict(check_beta_mgf(BetaLawParams::make(alpha, beta), lambdas, n, rng));
      },
      py::arg("alpha"), py::arg("beta"), py::arg("lambdas"), py::arg("n_samples"), py::arg("seed") = 0);
  m.def(
      "check_sphere_mgf",
      [](std::size_t M, const std::vector<double>& lambdas, std::size_t n, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        std::vector<double> e1(M, 0.0);
        if (M > 0) e1[0] = 1.0;
        return mgf_to_dict(check_subgaussian_mgf([M](Rng& g) { return sample_sphere(M, g); },
                                                 SubGaussianSpec::sphere(M), e1, lambdas, n, rng));
      },
      py::arg("M"), py::arg("lambdas"), py::arg("n_samples"), py::arg("seed") = 0);
  m.def(
      "check_inner_product_law",
      [](std::size_t M, std::size_t n, std::uint64_t seed, double significance) {
        Rng rng = make_rng(seed);
        std::vector<double> e1(M, 0.0);
        if (M > 0) e1[0] = 1.0;
        const auto f = check_inner_product_law(M, e1, n, rng, significance);
        py::dict d;
        d["ks_statistic"] = f.ks_statistic;
        d["p_value"] = f.p_value;
        d["rejected"] = f.rejected;
        d["sample_variance"] = f.sample_variance;
        d["variance_se"] = f.variance_se;
        d["target_variance"] = f.target_variance;
        d["ok"] = f.ok();
        return d;
      },
      py::arg("M"), py::arg("n_samples"), py::arg("seed") = 0, py::arg("significance") = 1e-3);
  m.def("default_lambda_grid", &default_lambda_grid);

  py::class_<PySketch>(m, "Sketch")
      .def(py::init<double, const std::vector<double>&, double, std::size_t>(), py::arg("x0"),
           py::arg("z0"), py::arg("eps"), py::arg("recompute_every") = SketchState::kDefaultRecomputeEvery)
      .def("update", &PySketch::update, py::arg("x"), py::arg("z"),
           "Advance one step; z must be a unit vector of the sketch dimension.")
      .def_property_readonly("t", [](const PySketch& s) { return s.state().t(); })
      .def_property_readonly("S", [](const PySketch& s) { return s.state().S(); })
      .def_property_readonly("Y", [](const PySketch& s) { return s.state().Y(); })
      .def_property_readonly("s", [](const PySketch& s) {
        return std::vector<double>(s.state().s().begin(), s.state().s().end());
      })
      .def_property_readonly("tau", [](const PySketch& s) { return s.state().tau(); })
      .def_property_readonly("good", [](const PySketch& s) { return s.state().good(); })
      .def_property_readonly("eps", [](const PySketch& s) { return s.state().eps(); })
      .def("direct_Y", [](const PySketch& s) { return s.state().direct_Y(); })
      .def("distortion", [](const PySketch& s) { return s.state().distortion(); });

  m.def("check_trigger_identity", &check_trigger_identity, py::arg("good_path"));

  m.def(
      "_run_experiment_json",
      [](const std::string& config_json, std::size_t workers, bool with_trials) {
        const ExperimentConfig config = config_from_json(nlohmann::json::parse(config_json));
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config, {workers});
        }
        nlohmann::json out = {{"report", to_json(result.report, false)}};
        if (with_trials) {
          nlohmann::json rows = nlohmann::json::array();
          for (const auto& t : result.trials) {
            rows.push_back({{"trial_id", t.trial_id},
                            {"failed", t.failed},
                            {"tau", t.tau ? nlohmann::json(*t.tau) : nlohmann::json(nullptr)},
                            {"max_distortion", t.max_distortion},
                            {"final_S", t.final_S},
                            {"final_A", t.final_A},
                            {"final_B_sq", t.final_B_sq},
                            {"boundary_crossed", t.boundary_crossed},
                            {"invalid", t.invalid}});
          }
          out["trials"] = rows;
        }
        return out.dump();
      },
      py::arg("config_json"), py::arg("workers") = 0, py::arg("with_trials") = false);
}
