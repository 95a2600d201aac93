#pragma once

#include <cmath>

#include "sirq/model.hpp"

namespace fixtures {

inline constexpr sirq::EpidemicState kInitial{1.0 - 1e-6, 1e-6};

// sigma1 = 0, sigma2 = sigma0, kappa = 0.
inline sirq::ModelParams baseline(double tau = 60.0) {
  return {0.01, 1.5, 0.0, 1.5, 2600.0, tau, 0.0};
}

// Partial hard quarantine, sigma2 = sigma0, kappa = 0.
inline sirq::ModelParams partial(double tau = 60.0) {
  return {0.01, 1.5, 0.3, 1.5, 2600.0, tau, 0.0};
}

// sigma2 < sigma0 and a positive cost weight.
inline sirq::ModelParams general(double tau = 180.0) {
  return {0.01, 2.2, 0.3, 1.5, 3200.0, tau, 1e-5};
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace fixtures
