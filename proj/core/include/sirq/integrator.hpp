#pragma once

#include <cstddef>
#include <vector>

#include "sirq/model.hpp"

namespace sirq {

struct IntegratorOptions {
  // Largest RK4 step; 0 selects 0.1 / gamma.
  double max_step = 0.0;
  // Every constant-sigma segment is split into at least this many equal steps.
  int min_steps_per_segment = 2000;
  // Threshold used by invariant checks on the per-segment first integral.
  double conservation_tolerance = 1e-9;

  double resolved_max_step(const ModelParams& params) const;
  // Number of equal steps used for a segment of the given length.
  int steps_for(const ModelParams& params, double length) const;
};

// A maximal interval of constant reproduction number.
struct ControlSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  double sigma = 0.0;
};

// Piecewise-constant control induced by `schedule` on [0, horizon]: sigma2,
// sigma1 on [t1, t1 + eta), sigma2 until T and sigma0 past T. Empty segments
// are dropped and equal neighbours inside [0, T] are merged; T is always a
// segment boundary.
std::vector<ControlSegment> control_segments(const ModelParams& params, const Schedule& schedule,
                                             double horizon);

// Integrals of x/y and 1/y over one segment, accumulated alongside the state.
struct SegmentIntegrals {
  double x_over_y = 0.0;
  double inv_y = 0.0;

  // Integral of (sigma_ref * x - 1) / y.
  double with_sigma(double sigma_ref) const noexcept { return sigma_ref * x_over_y - inv_y; }
};

struct TrajectorySegment {
  ControlSegment control;
  std::size_t first = 0;  // sample index of t_begin
  std::size_t last = 0;   // sample index of t_end (shared with the next segment)
  SegmentIntegrals integrals;
};

// Dense solution of the controlled system. Samples at segment boundaries are
// stored once; `sigma[i]` is the control on [times[i], times[i+1]) and the
// final sample repeats the last segment's value.
struct Trajectory {
  std::vector<double> times;
  std::vector<EpidemicState> states;
  std::vector<double> sigma;
  std::vector<TrajectorySegment> segments;

  std::size_t size() const noexcept { return times.size(); }
  const EpidemicState& back() const { return states.back(); }
  // End times of the segments (the jump times followed by the horizon).
  std::vector<double> segment_boundaries() const;
};

// Integrates the SIR system under `schedule` on [0, horizon] with fixed-step
// RK4, restarting exactly at every jump of sigma. Throws DomainError for
// invalid inputs and IntegrationError when a state goes non-finite.
Trajectory integrate(const ModelParams& params, const EpidemicState& initial,
                     const Schedule& schedule, double horizon, const IntegratorOptions& options = {});

// Advances `start` by `length` time units at constant sigma, without storing
// samples. Returns the end state and fills `integrals` when non-null.
EpidemicState advance(const ModelParams& params, const EpidemicState& start, double t_start,
                      double length, double sigma, const IntegratorOptions& options,
                      SegmentIntegrals* integrals = nullptr);

// Max over the segment's samples of |x e^{-s(x+y)} - x_a e^{-s(x_a+y_a)}|
// divided by the start value.
double conserved_residual(const Trajectory& trajectory, std::size_t segment);

}  // namespace sirq
