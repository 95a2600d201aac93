#include "sirq/model.hpp"

#include <cmath>
#include <string>

#include "sirq/error.hpp"

namespace sirq {
namespace {

bool finite(double v) { return std::isfinite(v); }

std::string num(double v) { return std::to_string(v); }

}  // namespace

void ModelParams::validate(bool allow_full_horizon) const {
  if (!finite(gamma) || !finite(sigma0) || !finite(sigma1) || !finite(sigma2) || !finite(T) ||
      !finite(tau) || !finite(kappa)) {
    throw DomainError("model parameters must be finite");
  }
  if (gamma <= 0.0) throw DomainError("gamma must be > 0, got " + num(gamma));
  if (kappa < 0.0) throw DomainError("kappa must be >= 0, got " + num(kappa));
  if (sigma1 < 0.0) throw DomainError("sigma1 must be >= 0, got " + num(sigma1));
  if (!(sigma1 < sigma2)) throw DomainError("sigma1 must be < sigma2");
  if (!(sigma2 <= sigma0)) throw DomainError("sigma2 must be <= sigma0");
  if (T <= 0.0) throw DomainError("T must be > 0, got " + num(T));
  if (tau <= 0.0) throw DomainError("tau must be > 0, got " + num(tau));
  if (allow_full_horizon ? tau > T : tau >= T) {
    throw DomainError("tau must be < T (tau=" + num(tau) + ", T=" + num(T) + ")");
  }
}

void validate_state(const EpidemicState& state) {
  if (!finite(state.x) || !finite(state.y)) throw DomainError("state must be finite");
  if (state.x <= 0.0) throw DomainError("x must be > 0, got " + num(state.x));
  if (state.y <= 0.0) throw DomainError("y must be > 0, got " + num(state.y));
  if (state.x + state.y > 1.0 + kSimplexSlack) throw DomainError("x + y must be <= 1");
}

void validate_initial(const EpidemicState& state) {
  if (finite(state.y) && state.y < kMinInitialInfected) {
    throw DomainError("y0 must be >= 1e-12, got " + num(state.y));
  }
  validate_state(state);
}

bool in_region(const ModelParams& params, const Schedule& schedule) {
  const double slack = 1e-9 * params.T;
  return std::isfinite(schedule.t1) && std::isfinite(schedule.eta) && schedule.eta >= 0.0 &&
         schedule.eta <= params.tau + slack && schedule.t1 >= 0.0 &&
         schedule.t1 + schedule.eta <= params.T + slack;
}

void validate_schedule(const ModelParams& params, const Schedule& schedule) {
  if (!in_region(params, schedule)) {
    throw DomainError("schedule (t1=" + num(schedule.t1) + ", eta=" + num(schedule.eta) +
                      ") outside admissible region");
  }
}

}  // namespace sirq
