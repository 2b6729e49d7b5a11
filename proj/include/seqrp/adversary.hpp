#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "seqrp/distributions.hpp"
#include "seqrp/rng.hpp"
#include "seqrp/sketch.hpp"

namespace seqrp {

// Reference strategies for choosing x_t from the observable history.
enum class StrategyKind {
  kConstant,     // x_t = value (default sqrt(c_x))
  kUniform,      // x_t ~ Uniform(0, sqrt(c_x)]
  kAmplify,      // sqrt(c_x) while |Y| >= theta S, else rho sqrt(c_x)
  kBurst,        // sqrt(c_x) for t <= k, then rho sqrt(c_x)
  kZeroAfter,    // sqrt(c_x) for t <= k, then 0
  kAlternating,  // +/- sqrt(c_x), sign flips every step
};

inline constexpr std::array<StrategyKind, 6> kAllStrategies = {
    StrategyKind::kConstant,  StrategyKind::kUniform,   StrategyKind::kAmplify,
    StrategyKind::kBurst,     StrategyKind::kZeroAfter, StrategyKind::kAlternating,
};

std::string_view to_string(StrategyKind kind) noexcept;
/// Accepts the snake_case names: constant, uniform, amplify, burst, zero_after, alternating.
StrategyKind parse_strategy_kind(std::string_view name);

struct StrategySpec {
  StrategyKind kind = StrategyKind::kConstant;
  double c_x = 1.0;
  /// constant: emitted value; NaN selects sqrt(c_x).
  double value = std::numeric_limits<double>::quiet_NaN();
  /// amplify: deviation threshold on |Y| / S.
  double theta = 0.1;
  /// amplify / burst: fraction of sqrt(c_x) emitted in the quiet regime.
  double rho = 0.1;
  /// burst / zero_after: number of loud steps.
  std::size_t k = 10;

  void validate() const;
};

/// Everything observable when choosing x_t: x_0..x_{t-1}, z_0..z_{t-1} and
/// the sketch after step t-1. z_t is not part of the history.
struct History {
  std::size_t t = 1;
  std::span<const double> xs;
  std::span<const ProjectionVector> zs;
  const SketchState& state;
};

/// Largest double r with r * r <= c.
double sqrt_floor(double c);

/// x_t = f_t(history). Always satisfies x_t^2 <= spec.c_x; deterministic given
/// (spec, history, rng state).
double next_x(const StrategySpec& spec, const History& history, Rng& rng);

}  // namespace seqrp
