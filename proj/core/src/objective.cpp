#include "sirq/objective.hpp"

#include <algorithm>

#include "sirq/final_size.hpp"

namespace sirq {

double control_integral(const ModelParams& params, const Schedule& schedule) {
  const double eta = std::clamp(schedule.eta, 0.0, params.T);
  return params.sigma1 * eta + params.sigma2 * (params.T - eta);
}

double objective(const ModelParams& params, const EpidemicState& initial, const Schedule& schedule,
                 const IntegratorOptions& options) {
  params.validate();
  validate_state(initial);
  validate_schedule(params, schedule);

  EpidemicState state = initial;
  for (const auto& c : control_segments(params, schedule, params.T)) {
    state = advance(params, state, c.t_begin, c.t_end - c.t_begin, c.sigma, options);
  }
  return x_infinity(params, state) + params.kappa * control_integral(params, schedule);
}

}  // namespace sirq
