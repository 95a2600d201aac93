#include "sirq/final_size.hpp"

#include <cmath>
#include <limits>

#include "sirq/error.hpp"

namespace sirq {
namespace {

constexpr double kBracketEps = 1e-15;
constexpr double kNewtonSwitch = 1e-6;
constexpr double kRootTolerance = 1e-12;

}  // namespace

double x_infinity(const ModelParams& params, const EpidemicState& state) {
  validate_state(state);
  const double s0 = params.sigma0;
  if (!(s0 > 0.0)) throw DomainError("sigma0 must be > 0");

  // g(z) = ln z - s0 z - (ln x - s0 (x + y)) is increasing on (0, 1/s0).
  const double level = std::log(state.x) - s0 * (state.x + state.y);
  const auto g = [&](double z) { return std::log(z) - s0 * z - level; };

  double lo = kBracketEps;
  double hi = 1.0 / s0 - kBracketEps;
  if (!(g(lo) < 0.0) || !(g(hi) > 0.0)) {
    throw InternalError("x_infinity: root not bracketed on (0, 1/sigma0)");
  }

  while (hi - lo > kNewtonSwitch) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }

  // Safeguarded Newton, run until the step stalls at rounding level.
  double z = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double gz = g(z);
    if (gz == 0.0) return z;
    (gz < 0.0 ? lo : hi) = z;
    const double slope = 1.0 / z - s0;
    double next = z - gz / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - z);
    z = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * z) break;
  }
  if (hi - lo > kRootTolerance && std::abs(g(z)) > kRootTolerance) {
    throw InternalError("x_infinity: Newton refinement did not converge");
  }
  return z;
}

FinalSizePartials x_infinity_partials(const ModelParams& params, const EpidemicState& state,
                                      double x_inf) {
  validate_state(state);
  const double s0 = params.sigma0;
  const double ratio = x_inf / (1.0 - s0 * x_inf);
  return {(1.0 - s0 * state.x) / state.x * ratio, -s0 * ratio};
}

FinalSizePartials x_infinity_partials(const ModelParams& params, const EpidemicState& state) {
  return x_infinity_partials(params, state, x_infinity(params, state));
}

}  // namespace sirq
