#pragma once

#include <cstddef>

namespace sirq {

// Scalar constants of the controlled SIR problem.
//
// sigma0 is the reproduction number after the intervention window [0, T];
// sigma1 (hard quarantine) and sigma2 (soft quarantine) bound the control
// inside it, and the hard value may be used for at most `tau` time units.
struct ModelParams {
  double gamma = 0.01;
  double sigma0 = 1.5;
  double sigma1 = 0.0;
  double sigma2 = 1.5;
  double T = 2600.0;
  double tau = 60.0;
  double kappa = 0.0;

  // Throws DomainError unless 0 <= sigma1 < sigma2 <= sigma0, 0 < tau < T,
  // gamma > 0 and kappa >= 0. `allow_full_horizon` relaxes tau < T to tau <= T.
  void validate(bool allow_full_horizon = false) const;
};

// Susceptible / infected fractions.
struct EpidemicState {
  double x = 0.0;
  double y = 0.0;
};

// Smallest accepted initial infected fraction.
inline constexpr double kMinInitialInfected = 1e-12;
// Rounding slack on x + y <= 1.
inline constexpr double kSimplexSlack = 1e-12;

// Throws DomainError unless x > 0, y > 0 and x + y <= 1.
void validate_state(const EpidemicState& state);

// validate_state plus the y >= kMinInitialInfected rule for user input.
void validate_initial(const EpidemicState& state);

// Hard-quarantine window [t1, t1 + eta].
struct Schedule {
  double t1 = 0.0;
  double eta = 0.0;

  double t2() const noexcept { return t1 + eta; }
};

// Throws DomainError unless 0 <= eta <= tau and 0 <= t1 <= T - eta.
void validate_schedule(const ModelParams& params, const Schedule& schedule);

// True when the schedule lies in the admissible trapezoid (with rounding slack).
bool in_region(const ModelParams& params, const Schedule& schedule);

}  // namespace sirq
