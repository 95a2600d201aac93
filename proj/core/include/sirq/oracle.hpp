#pragma once

#include <cstddef>
#include <vector>

#include "sirq/integrator.hpp"
#include "sirq/model.hpp"

namespace sirq {

struct GridCell {
  double t1 = 0.0;
  double eta = 0.0;
  double J = 0.0;
};

struct GridResult {
  Schedule best;
  double best_J = 0.0;
  int n_t1 = 0;
  int n_eta = 0;
  // Row-major: row j holds eta_j, column i holds t1_i of that row.
  std::vector<GridCell> cells;
};

// Evaluates J on the trapezoid R sampled as eta_j = tau j / (n_eta - 1) and
// t1_i = (T - eta_j) i / (n_t1 - 1). Ties go to the smallest t1, then the
// smallest eta, so the result does not depend on `threads`.
GridResult grid_search(const ModelParams& params, const EpidemicState& initial, int n_t1,
                       int n_eta, const IntegratorOptions& options = {}, unsigned threads = 1);

struct RefineOptions {
  IntegratorOptions integrator;
  double min_step = 1e-4;
  int max_evaluations = 20000;
};

struct RefineResult {
  Schedule schedule;
  double J = 0.0;
  int evaluations = 0;
  double final_step = 0.0;
};

// Compass search over (t1, eta) started at `seed` with step `radius`,
// projecting every trial point onto R and halving the step after a sweep
// without strict improvement, until the step drops below min_step.
RefineResult refine(const ModelParams& params, const EpidemicState& initial, const Schedule& seed,
                    double radius, const RefineOptions& options = {});

// Euclidean projection of (t1, eta) onto R.
Schedule project_to_region(const ModelParams& params, const Schedule& point);

}  // namespace sirq
