#include "seqrp/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqrp/error.hpp"

namespace seqrp {

SketchState SketchState::init(double x0, std::span<const double> z0, double eps,
                              std::size_t recompute_every) {
  detail::require(std::isfinite(x0) && x0 != 0.0, "sketch init: x0 must be finite and nonzero");
  detail::require(eps > 0.0 && eps < 1.0, "sketch init: eps must lie in (0, 1)");
  detail::require(!z0.empty(), "sketch init: z0 must have dimension >= 1");
  const double z_norm_sq = norm_sq(z0);
  detail::require(std::abs(z_norm_sq - 1.0) <= 0.5 * eps,
                  "sketch init: | ||z0||^2 - 1 | must not exceed eps / 2");

  SketchState st;
  st.eps_ = eps;
  st.x0_ = x0;
  st.recompute_every_ = recompute_every;
  st.s_.resize(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) st.s_[i] = x0 * z0[i];
  st.S_ = x0 * x0;
  st.Y_ = st.S_ * (z_norm_sq - 1.0);
  st.good_ = st.evaluate_good();
  if (!st.good_) st.tau_ = 0;
  return st;
}

bool SketchState::evaluate_good() const noexcept { return std::abs(Y_) <= eps_ * S_; }

StepOutcome SketchState::update(double x, const ProjectionVector& z) {
  if (z.dim() != s_.size()) {
    throw ValidationError("sketch update: z has dimension " + std::to_string(z.dim()) +
                          ", sketch has " + std::to_string(s_.size()));
  }
  StepOutcome out;
  out.stopped = tau_.has_value();
  out.inner = dot(z.coords(), s_);
  out.y_increment = 2.0 * x * out.inner + x * x * (z.norm_sq() - 1.0);
  if (x == 0.0) out.y_increment = 0.0;

  ++t_;
  out.t = t_;
  if (x != 0.0) {
    const auto zc = z.coords();
    for (std::size_t i = 0; i < s_.size(); ++i) s_[i] += x * zc[i];
    S_ += x * x;
    Y_ += out.y_increment;
    // Zero steps leave the state bit-identical, so the drift counter only
    // advances on nonzero inputs.
    if (recompute_every_ != 0 && ++since_recompute_ >= recompute_every_) {
      Y_ = direct_Y();
      since_recompute_ = 0;
    }
  }

  good_ = evaluate_good();
  if (!good_ && !tau_) tau_ = t_;
  out.good = good_;
  out.stopped_increment = out.stopped ? 0.0 : out.y_increment;
  return out;
}

double SketchState::direct_Y() const noexcept { return norm_sq(s_) - S_; }

double SketchState::distortion() const {
  if (!(S_ > 0.0)) throw NumericError("distortion: undefined for S = 0");
  return std::abs(Y_) / S_;
}

TraceRow SketchState::trace_row(double x, double inner) const {
  return {t_, x, inner, Y_, S_, distortion(), good_, tau_.has_value()};
}

bool check_trigger_identity(const std::vector<bool>& good_path) {
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
  std::size_t tau = kNever;
  for (std::size_t t = 0; t < good_path.size(); ++t) {
    if (!good_path[t]) {
      tau = t;
      break;
    }
  }
  for (std::size_t t = 0; t < good_path.size(); ++t) {
    const bool stopped_by_t = tau <= t;
    const bool bad_at_stop = !good_path[std::min(t, tau)];
    if (stopped_by_t != bad_at_stop) return false;
  }
  return true;
}

}  // namespace seqrp
