#include "sirq/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rk4.hpp"
#include "sirq/error.hpp"
#include "sirq/final_size.hpp"
#include "sirq/objective.hpp"

namespace sirq {
namespace {

struct Costate {
  double l1;
  double l2;
};

Costate adjoint_rhs(double gamma, double sigma, const EpidemicState& s, const Costate& c) {
  const double diff = c.l1 - c.l2;
  return {diff * gamma * sigma * s.y, diff * gamma * sigma * s.x + gamma * c.l2};
}

Costate shift(const Costate& c, double h, const Costate& k) {
  return {c.l1 + h * k.l1, c.l2 + h * k.l2};
}

// Tolerance for deciding that the duration constraint is binding.
double active_tolerance(const ModelParams& params) { return 1e-9 * params.T; }

bool is_jump_time(const Trajectory& traj, std::size_t i) {
  for (const auto& seg : traj.segments) {
    if (i == seg.first && seg.first != 0) return true;
  }
  return false;
}

}  // namespace

AdjointPath integrate_adjoint(const ModelParams& params, const EpidemicState& initial,
                              const Schedule& schedule, const IntegratorOptions& options,
                              std::optional<double> lambda3) {
  AdjointPath path;
  path.forward = integrate(params, initial, schedule, params.T, options);
  const Trajectory& traj = path.forward;
  const std::size_t n = traj.size();
  path.times = traj.times;
  path.lambda1.assign(n, 0.0);
  path.lambda2.assign(n, 0.0);

  const double g = params.gamma;
  const EpidemicState& end = traj.back();
  const double x_inf = x_infinity(params, end);
  const auto terminal = x_infinity_partials(params, end, x_inf);
  Costate c{terminal.d_dx, terminal.d_dy};
  path.lambda1[n - 1] = c.l1;
  path.lambda2[n - 1] = c.l2;

  for (auto seg = traj.segments.rbegin(); seg != traj.segments.rend(); ++seg) {
    const double sigma = seg->control.sigma;
    for (std::size_t k = seg->last; k > seg->first; --k) {
      const double h = traj.times[k] - traj.times[k - 1];
      const EpidemicState& lo = traj.states[k - 1];
      const EpidemicState& hi = traj.states[k];
      // Midpoint state from a forward half step off the stored sample.
      const auto half = detail::rk4_step(g, sigma, {lo.x, lo.y, 0.0, 0.0}, 0.5 * h);
      const EpidemicState mid{half.x, half.y};
      // Backward in time: d lambda / d(-t) = -rhs.
      const Costate k1 = adjoint_rhs(g, sigma, hi, c);
      const Costate k2 = adjoint_rhs(g, sigma, mid, shift(c, -0.5 * h, k1));
      const Costate k3 = adjoint_rhs(g, sigma, mid, shift(c, -0.5 * h, k2));
      const Costate k4 = adjoint_rhs(g, sigma, lo, shift(c, -h, k3));
      c.l1 -= h / 6.0 * (k1.l1 + 2.0 * k2.l1 + 2.0 * k3.l1 + k4.l1);
      c.l2 -= h / 6.0 * (k1.l2 + 2.0 * k2.l2 + 2.0 * k3.l2 + k4.l2);
      if (!std::isfinite(c.l1) || !std::isfinite(c.l2)) {
        throw IntegrationError("non-finite costate", traj.times[k - 1]);
      }
      path.lambda1[k - 1] = c.l1;
      path.lambda2[k - 1] = c.l2;
    }
  }

  path.phi_free.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = traj.states[i];
    path.phi_free[i] = params.kappa + g * s.x * s.y * (path.lambda2[i] - path.lambda1[i]);
  }

  path.constraint_active =
      std::abs(control_integral(params, schedule) - (params.sigma1 * params.tau +
                                                     params.sigma2 * (params.T - params.tau))) <=
      active_tolerance(params) * std::max(1.0, params.sigma2);

  if (lambda3) {
    path.lambda3 = *lambda3;
  } else if (!path.constraint_active) {
    path.lambda3 = 0.0;
  } else {
    double sum = 0.0;
    int count = 0;
    for (const auto& seg : traj.segments) {
      if (seg.first == 0 || traj.times[seg.first] >= params.T) continue;
      sum += path.phi_free[seg.first];
      ++count;
    }
    const double anchor = count > 0 ? sum / count : path.phi_free.back();
    path.lambda3 = std::max(0.0, -anchor);
  }

  path.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) path.phi[i] = path.phi_free[i] + path.lambda3;
  return path;
}

PmpReport verify_necessary_conditions(const ModelParams& params, const Schedule& schedule,
                                      const AdjointPath& path) {
  const Trajectory& traj = path.forward;
  const std::size_t n = traj.size();
  const double g = params.gamma;

  PmpReport rep;
  rep.lambda3 = path.lambda3;
  rep.constraint_active = path.constraint_active;
  rep.phi_T = path.phi.back();
  rep.complementarity_residual =
      path.lambda3 * (control_integral(params, schedule) - params.sigma2 * (params.T - params.tau) -
                      params.sigma1 * params.tau);

  double phi_scale = 0.0;
  for (double p : path.phi) phi_scale = std::max(phi_scale, std::abs(p));
  const double band = kPhiDeadBand * phi_scale;

  // Samples on a jump carry both control values, so they are left out of
  // the sign test. The last sample belongs to the final segment.
  const double mid_sigma = 0.5 * (params.sigma1 + params.sigma2);
  double need_lo = 0.0;  // lambda3 must exceed this on sigma2 samples
  double need_hi = std::numeric_limits<double>::infinity();
  int last_sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = path.phi[i];
    const int s = std::abs(p) <= band ? 0 : (p > 0.0 ? 1 : -1);
    if (s == 0) {
      ++rep.dead_band_samples;
    } else {
      if (last_sign != 0 && s != last_sign) ++rep.sign_changes;
      last_sign = s;
    }
    if (is_jump_time(traj, i)) continue;
    ++rep.checked_samples;
    const bool high = traj.sigma[i] > mid_sigma;
    if ((high && s < 0) || (!high && s > 0)) ++rep.sign_contradictions;
    if (high) {
      need_lo = std::max(need_lo, -path.phi_free[i] + band);
    } else {
      need_hi = std::min(need_hi, -path.phi_free[i] - band);
    }
  }
  if (rep.checked_samples > 0) {
    rep.contradiction_fraction =
        static_cast<double>(rep.sign_contradictions) / rep.checked_samples;
  }
  rep.multiplier_sensitive = rep.sign_contradictions > 0 && need_lo <= need_hi;

  std::vector<double> H(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double control = traj.sigma[i] * path.phi[i];
    const double drift = g * path.lambda2[i] * traj.states[i].y;
    H[i] = control - drift;
    scale = std::max(scale, std::abs(control) + std::abs(drift));
  }
  std::vector<double> sorted = H;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double median = sorted[n / 2];
  double worst = 0.0;
  for (double h : H) worst = std::max(worst, std::abs(h - median));
  rep.hamiltonian_deviation = scale > 0.0 ? worst / scale : 0.0;
  return rep;
}

PmpReport verify_necessary_conditions(const ModelParams& params, const EpidemicState& initial,
                                      const Schedule& schedule, const IntegratorOptions& options) {
  return verify_necessary_conditions(params, schedule,
                                     integrate_adjoint(params, initial, schedule, options));
}

}  // namespace sirq
