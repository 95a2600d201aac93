#include "sirq/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rk4.hpp"
#include "sirq/error.hpp"

namespace sirq {

double IntegratorOptions::resolved_max_step(const ModelParams& params) const {
  return max_step > 0.0 ? max_step : 0.1 / params.gamma;
}

int IntegratorOptions::steps_for(const ModelParams& params, double length) const {
  if (length <= 0.0) return 0;
  const double by_step = std::ceil(length / resolved_max_step(params));
  return std::max(std::max(min_steps_per_segment, 1), static_cast<int>(by_step));
}

std::vector<ControlSegment> control_segments(const ModelParams& params, const Schedule& schedule,
                                             double horizon) {
  const double T = params.T;
  double t1 = std::clamp(schedule.t1, 0.0, T);
  double t2 = std::clamp(schedule.t2(), t1, T);
  // t1 + eta is rounded, so a window meant to end at T can stop an ulp short.
  // Breakpoints that close together are the same instant; without the snap
  // the sliver between them would get a full segment's worth of steps.
  const double snap = 8.0 * std::numeric_limits<double>::epsilon() * T;
  if (t1 <= snap) t1 = 0.0;
  if (T - t2 <= snap) t2 = T;
  if (t2 - t1 <= snap) t2 = t1;

  const ControlSegment raw[] = {
      {0.0, t1, params.sigma2},
      {t1, t2, params.sigma1},
      {t2, T, params.sigma2},
      {T, horizon, params.sigma0},
  };

  std::vector<ControlSegment> out;
  for (ControlSegment seg : raw) {
    seg.t_end = std::min(seg.t_end, horizon);
    if (seg.t_end <= seg.t_begin) continue;
    if (!out.empty() && out.back().sigma == seg.sigma && seg.t_begin < T) {
      out.back().t_end = seg.t_end;
      continue;
    }
    out.push_back(seg);
  }
  return out;
}

std::vector<double> Trajectory::segment_boundaries() const {
  std::vector<double> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) out.push_back(seg.control.t_end);
  return out;
}

namespace {

void check_state(const detail::Augmented& u, double t) {
  if (!std::isfinite(u.x) || !std::isfinite(u.y) || !std::isfinite(u.inv_y)) {
    throw IntegrationError("non-finite state", t);
  }
  if (u.y <= 0.0) throw IntegrationError("infected fraction reached zero", t);
}

}  // namespace

EpidemicState advance(const ModelParams& params, const EpidemicState& start, double t_start,
                      double length, double sigma, const IntegratorOptions& options,
                      SegmentIntegrals* integrals) {
  detail::CompensatedRk4 rk({start.x, start.y, 0.0, 0.0});
  const int n = options.steps_for(params, length);
  if (n > 0) {
    const double h = length / n;
    for (int k = 1; k <= n; ++k) {
      rk.step(params.gamma, sigma, h);
      check_state(rk.state(), t_start + k * h);
    }
  }
  const detail::Augmented& u = rk.state();
  if (integrals != nullptr) *integrals = {u.x_over_y, u.inv_y};
  return {u.x, u.y};
}

Trajectory integrate(const ModelParams& params, const EpidemicState& initial,
                     const Schedule& schedule, double horizon, const IntegratorOptions& options) {
  params.validate();
  validate_state(initial);
  validate_schedule(params, schedule);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("horizon must be positive and finite");
  }

  const auto controls = control_segments(params, schedule, horizon);

  Trajectory traj;
  std::size_t total = 1;
  for (const auto& c : controls) total += options.steps_for(params, c.t_end - c.t_begin);
  traj.times.reserve(total);
  traj.states.reserve(total);
  traj.sigma.reserve(total);

  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  traj.sigma.push_back(controls.empty() ? params.sigma2 : controls.front().sigma);

  EpidemicState x = initial;
  for (const auto& c : controls) {
    TrajectorySegment seg;
    seg.control = c;
    seg.first = traj.times.size() - 1;
    traj.sigma.back() = c.sigma;

    const double length = c.t_end - c.t_begin;
    const int n = options.steps_for(params, length);
    const double h = length / n;
    detail::CompensatedRk4 rk({x.x, x.y, 0.0, 0.0});
    for (int k = 1; k <= n; ++k) {
      rk.step(params.gamma, c.sigma, h);
      const double t = k == n ? c.t_end : c.t_begin + k * h;
      check_state(rk.state(), t);
      traj.times.push_back(t);
      traj.states.push_back({rk.state().x, rk.state().y});
      traj.sigma.push_back(c.sigma);
    }
    x = traj.states.back();
    seg.last = traj.times.size() - 1;
    seg.integrals = {rk.state().x_over_y, rk.state().inv_y};
    traj.segments.push_back(seg);
  }
  return traj;
}

double conserved_residual(const Trajectory& trajectory, std::size_t segment) {
  if (segment >= trajectory.segments.size()) {
    throw DomainError("segment index " + std::to_string(segment) + " out of range");
  }
  const auto& seg = trajectory.segments[segment];
  const double s = seg.control.sigma;
  const auto first_integral = [s](const EpidemicState& st) {
    return st.x * std::exp(-s * (st.x + st.y));
  };
  const double reference = first_integral(trajectory.states[seg.first]);
  double worst = 0.0;
  for (std::size_t i = seg.first; i <= seg.last; ++i) {
    worst = std::max(worst, std::abs(first_integral(trajectory.states[i]) - reference));
  }
  return worst / reference;
}

}  // namespace sirq
