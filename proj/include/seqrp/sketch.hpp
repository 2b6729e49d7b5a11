#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "seqrp/distributions.hpp"

namespace seqrp {

struct StepOutcome {
  std::size_t t = 0;
  /// Y_t - Y_{t-1} = 2 x_t <z_t, s_{t-1}> + x_t^2 (||z_t||^2 - 1).
  double y_increment = 0.0;
  /// <z_t, s_{t-1}>.
  double inner = 0.0;
  /// Good event |Y_t| <= eps S_t after this step.
  bool good = true;
  /// y_increment if t <= tau, else exactly 0.
  double stopped_increment = 0.0;
  /// True when tau < t, i.e. the process was already stopped before this step.
  bool stopped = false;
};

/// One row of a path trace.
struct TraceRow {
  std::size_t t = 0;
  double x = 0.0;
  double inner = 0.0;
  double Y = 0.0;
  double S = 0.0;
  double distortion = 0.0;
  bool good = true;
  bool tau_set = false;
};

/// Incremental sequential random projection of a scalar stream x_0, x_1, ...
///
/// Maintains s_t = sum x_i z_i, S_t = sum x_i^2 and Y_t = ||s_t||^2 - S_t.
/// Y is advanced by the one-step recursion and recomputed directly from s
/// every `recompute_every` nonzero steps (0 disables recomputation). The first step at
/// which |Y_t| > eps S_t is latched as the stopping time tau.
class SketchState {
 public:
  static constexpr std::size_t kDefaultRecomputeEvery = 256;

  /// Requires x0 != 0, eps in (0, 1), and | ||z0||^2 - 1 | <= eps / 2.
  static SketchState init(double x0, std::span<const double> z0, double eps,
                          std::size_t recompute_every = kDefaultRecomputeEvery);

  /// Advances to step t + 1. Throws ValidationError on dimension mismatch.
  StepOutcome update(double x, const ProjectionVector& z);

  std::size_t t() const noexcept { return t_; }
  std::size_t history_len() const noexcept { return t_ + 1; }
  std::size_t dim() const noexcept { return s_.size(); }
  std::span<const double> s() const noexcept { return s_; }
  double S() const noexcept { return S_; }
  double Y() const noexcept { return Y_; }
  double eps() const noexcept { return eps_; }
  double x0() const noexcept { return x0_; }
  std::optional<std::size_t> tau() const noexcept { return tau_; }
  bool stopped() const noexcept { return tau_.has_value(); }
  bool good() const noexcept { return good_; }
  std::size_t recompute_every() const noexcept { return recompute_every_; }

  /// ||s_t||^2 - S_t evaluated from scratch.
  double direct_Y() const noexcept;
  /// |Y_t| / S_t. Throws NumericError when S_t = 0.
  double distortion() const;

  TraceRow trace_row(double x, double inner) const;

 private:
  SketchState() = default;
  bool evaluate_good() const noexcept;

  std::size_t t_ = 0;
  std::vector<double> s_;
  double S_ = 0.0;
  double Y_ = 0.0;
  double eps_ = 0.5;
  double x0_ = 1.0;
  std::optional<std::size_t> tau_;
  bool good_ = true;
  std::size_t recompute_every_ = kDefaultRecomputeEvery;
  std::size_t since_recompute_ = 0;
};

/// Free-function form of SketchState::distortion.
inline double distortion(const SketchState& state) { return state.distortion(); }

/// Checks {tau <= t} == not E_{min(t, tau)} for every t of a good-event path,
/// where tau is the first bad index (infinity if none).
bool check_trigger_identity(const std::vector<bool>& good_path);

}  // namespace seqrp
