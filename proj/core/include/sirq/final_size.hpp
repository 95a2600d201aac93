#pragma once

#include <utility>

#include "sirq/model.hpp"

namespace sirq {

// Long-time susceptible fraction reached from `state` when sigma0 acts
// forever: the unique root z in (0, 1/sigma0) of
//   z e^{-sigma0 z} = x e^{-sigma0 (x + y)}.
// Throws DomainError for states outside D.
double x_infinity(const ModelParams& params, const EpidemicState& state);

struct FinalSizePartials {
  double d_dx = 0.0;
  double d_dy = 0.0;
};

// Closed-form partial derivatives of x_infinity with respect to x and y.
FinalSizePartials x_infinity_partials(const ModelParams& params, const EpidemicState& state);

// Same, reusing an already computed x_infinity.
FinalSizePartials x_infinity_partials(const ModelParams& params, const EpidemicState& state,
                                      double x_inf);

}  // namespace sirq
