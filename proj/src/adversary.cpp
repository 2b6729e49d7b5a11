#include "seqrp/adversary.hpp"

#include <cmath>
#include <string>

#include <boost/random/uniform_real_distribution.hpp>

#include "seqrp/error.hpp"

namespace seqrp {

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::kConstant: return "constant";
    case StrategyKind::kUniform: return "uniform";
    case StrategyKind::kAmplify: return "amplify";
    case StrategyKind::kBurst: return "burst";
    case StrategyKind::kZeroAfter: return "zero_after";
    case StrategyKind::kAlternating: return "alternating";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (StrategyKind k : kAllStrategies) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

void StrategySpec::validate() const {
  detail::require(c_x > 0.0 && std::isfinite(c_x), "strategy: c_x must be positive");
  if (!std::isnan(value)) {
    detail::require(std::isfinite(value) && value * value <= c_x,
                    "strategy: constant value must satisfy value^2 <= c_x");
  }
  detail::require(theta >= 0.0 && std::isfinite(theta), "strategy: theta must be nonnegative");
  detail::require(rho > 0.0 && rho <= 1.0, "strategy: rho must lie in (0, 1]");
}

double sqrt_floor(double c) {
  double r = std::sqrt(c);
  while (r * r > c) r = std::nextafter(r, 0.0);
  return r;
}

double next_x(const StrategySpec& spec, const History& h, Rng& rng) {
  const double top = sqrt_floor(spec.c_x);
  switch (spec.kind) {
    case StrategyKind::kConstant:
      return std::isnan(spec.value) ? top : spec.value;
    case StrategyKind::kUniform: {
      // (0, top]: reflect the half-open [0, top) draw.
      boost::random::uniform_real_distribution<double> u(0.0, top);
      return top - u(rng);
    }
    case StrategyKind::kAmplify: {
      const SketchState& st = h.state;
      return std::abs(st.Y()) >= spec.theta * st.S() ? top : spec.rho * top;
    }
    case StrategyKind::kBurst:
      return h.t <= spec.k ? top : spec.rho * top;
    case StrategyKind::kZeroAfter:
      return h.t <= spec.k ? top : 0.0;
    case StrategyKind::kAlternating:
      return (h.t % 2 == 1) ? top : -top;
  }
  return 0.0;
}

}  // namespace seqrp
