#pragma once

#include "sirq/integrator.hpp"
#include "sirq/model.hpp"

namespace sirq {

// J = x_inf(x(T), y(T)) + kappa * (sigma1 * eta + sigma2 * (T - eta)).
double objective(const ModelParams& params, const EpidemicState& initial, const Schedule& schedule,
                 const IntegratorOptions& options = {});

// Exact integral of the piecewise-constant control over [0, T].
double control_integral(const ModelParams& params, const Schedule& schedule);

}  // namespace sirq
