#pragma once

#include <optional>
#include <vector>

#include "sirq/integrator.hpp"
#include "sirq/model.hpp"

namespace sirq {

// Costates along a forward trajectory, sampled on exactly its time grid.
struct AdjointPath {
  Trajectory forward;
  std::vector<double> times;
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<double> phi;       // kappa + lambda3 + gamma x y (lambda2 - lambda1)
  std::vector<double> phi_free;  // same with lambda3 = 0
  double lambda3 = 0.0;
  bool constraint_active = false;
};

// Integrates the costates backward from their terminal values at T with RK4
// on the forward grid. When `lambda3` is empty the multiplier is inferred:
// zero if the duration constraint is slack, otherwise the value that makes
// phi vanish (on average) at the interior switch times, falling back to
// max(0, -phi_free(T)) when there is none.
AdjointPath integrate_adjoint(const ModelParams& params, const EpidemicState& initial,
                              const Schedule& schedule, const IntegratorOptions& options = {},
                              std::optional<double> lambda3 = std::nullopt);

struct PmpReport {
  // max |H - median H| / max (|sigma phi| + |gamma lambda2 y|).
  double hamiltonian_deviation = 0.0;
  int sign_contradictions = 0;
  int checked_samples = 0;
  int sign_changes = 0;
  int dead_band_samples = 0;
  double contradiction_fraction = 0.0;
  // lambda3 (v(T) - sigma2 (T - tau) - sigma1 tau)
  double complementarity_residual = 0.0;
  double lambda3 = 0.0;
  bool constraint_active = false;
  // Contradictions exist but another lambda3 >= 0 would clear them.
  bool multiplier_sensitive = false;
  double phi_T = 0.0;

  bool passed(double hamiltonian_tolerance = 1e-5) const noexcept {
    return sign_contradictions == 0 && sign_changes <= 2 &&
           hamiltonian_deviation <= hamiltonian_tolerance;
  }
};

// Relative dead band for the phi sign tests.
inline constexpr double kPhiDeadBand = 1e-9;

PmpReport verify_necessary_conditions(const ModelParams& params, const EpidemicState& initial,
                                      const Schedule& schedule,
                                      const IntegratorOptions& options = {});

// Same checks on an already integrated adjoint path.
PmpReport verify_necessary_conditions(const ModelParams& params, const Schedule& schedule,
                                      const AdjointPath& path);

}  // namespace sirq
