#include "sirq/switching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rk4.hpp"
#include "sirq/error.hpp"
#include "sirq/final_size.hpp"
#include "sirq/parallel.hpp"

namespace sirq {

int dead_band_sign(double value, double band) noexcept {
  if (value > band) return 1;
  if (value < -band) return -1;
  return 0;
}

PrefixCache::PrefixCache(const ModelParams& params, const EpidemicState& initial,
                         const IntegratorOptions& options)
    : gamma_(params.gamma), sigma_(params.sigma2) {
  const double by_step = std::ceil(params.T / options.resolved_max_step(params));
  const int n = std::max(4 * std::max(options.min_steps_per_segment, 1), static_cast<int>(by_step));
  node_step_ = params.T / n;
  nodes_.reserve(static_cast<std::size_t>(n) + 1);
  nodes_.push_back(initial);
  detail::CompensatedRk4 rk({initial.x, initial.y, 0.0, 0.0});
  for (int k = 1; k <= n; ++k) {
    rk.step(gamma_, sigma_, node_step_);
    const detail::Augmented& u = rk.state();
    if (!std::isfinite(u.x) || !std::isfinite(u.y) || u.y <= 0.0) {
      throw IntegrationError("prefix integration failed", k * node_step_);
    }
    nodes_.push_back({u.x, u.y});
  }
}

EpidemicState PrefixCache::state_at(double t) const {
  const double horizon = node_step_ * static_cast<double>(nodes_.size() - 1);
  if (t < 0.0 || t > horizon * (1.0 + 1e-12)) {
    throw DomainError("prefix lookup outside [0, T]: t=" + std::to_string(t));
  }
  const auto k = std::min(static_cast<std::size_t>(t / node_step_), nodes_.size() - 1);
  const double dt = t - static_cast<double>(k) * node_step_;
  const EpidemicState& node = nodes_[k];
  if (dt <= 0.0) return node;
  const auto u = detail::rk4_step(gamma_, sigma_, {node.x, node.y, 0.0, 0.0}, dt);
  return {u.x, u.y};
}

namespace {

const ModelParams& checked(const ModelParams& params) {
  params.validate();
  return params;
}

const EpidemicState& checked(const EpidemicState& state) {
  validate_state(state);
  return state;
}

}  // namespace

SwitchingEvaluator::SwitchingEvaluator(const ModelParams& params, const EpidemicState& initial,
                                       const IntegratorOptions& options)
    : params_(checked(params)),
      initial_(checked(initial)),
      options_(options),
      prefix_(params_, initial_, options_) {}

ScheduleRun SwitchingEvaluator::run(const Schedule& schedule) const {
  validate_schedule(params_, schedule);
  const double T = params_.T;
  const double t1 = std::min(schedule.t1, T);
  const double t2 = std::clamp(schedule.t2(), t1, T);

  ScheduleRun r;
  r.schedule = schedule;
  r.at_t1 = prefix_.state_at(t1);
  r.at_t2 = advance(params_, r.at_t1, t1, t2 - t1, params_.sigma1, options_, &r.quarantine);
  r.at_T = advance(params_, r.at_t2, t2, T - t2, params_.sigma2, options_, &r.tail);
  r.x_inf = x_infinity(params_, r.at_T);
  r.ratio = r.x_inf / (1.0 - params_.sigma0 * r.x_inf);
  return r;
}

Schedule SwitchingEvaluator::border_schedule(double t) const {
  const double T = params_.T;
  if (t <= T - params_.tau) return {t, params_.tau};
  return {t, T - t};
}

namespace {

// 1 - gamma y2 * integral over [t2, T] of (sigma0 x - 1)/y. On the sigma2 tail
// gamma * integral of (sigma2 x - 1)/y equals 1/y2 - 1/y(T) exactly, so the
// factor is y2/y(T) - gamma y2 (sigma0 - sigma2) * integral of x/y. Summing
// the 1/y quadrature instead cancels catastrophically when y2 << y(T).
double tail_factor(const ModelParams& p, const ScheduleRun& r) {
  return r.at_t2.y / r.at_T.y - p.gamma * r.at_t2.y * (p.sigma0 - p.sigma2) * r.tail.x_over_y;
}

}  // namespace

double SwitchingEvaluator::w_from(const ScheduleRun& r, bool border_branch) const {
  const double s0 = params_.sigma0;
  if (border_branch) return r.quarantine.with_sigma(s0);
  // I0(q) - (1 - A) I2(q) with I0 - I2 = (sigma0 - sigma2) * integral of x/y.
  return (s0 - params_.sigma2) * r.quarantine.x_over_y +
         tail_factor(params_, r) * r.quarantine.with_sigma(params_.sigma2);
}

double SwitchingEvaluator::alpha_from(const ScheduleRun& r) const {
  const double g = params_.gamma;
  const double cost = params_.kappa * (1.0 - params_.sigma0 * r.x_inf) / (g * r.at_T.y * r.x_inf);
  return (1.0 - cost) / (g * r.at_t1.y);
}

double SwitchingEvaluator::z(double t) const {
  if (t < 0.0 || t > params_.T - params_.tau) throw DomainError("z requires 0 <= t <= T - tau");
  return run({t, params_.tau}).quarantine.with_sigma(params_.sigma0);
}

double SwitchingEvaluator::w(double t) const {
  if (t < 0.0 || t > params_.T) throw DomainError("w requires 0 <= t <= T");
  const bool border = t > params_.T - params_.tau;
  return w_from(run(border_schedule(t)), border);
}

double SwitchingEvaluator::w_sigma2_equals_sigma0(double t) const {
  if (params_.sigma2 != params_.sigma0) throw DomainError("reduced w requires sigma2 == sigma0");
  if (t < 0.0 || t > params_.T) throw DomainError("w requires 0 <= t <= T");
  const auto r = run(border_schedule(t));
  if (t > params_.T - params_.tau) return r.quarantine.with_sigma(params_.sigma0);
  return r.at_t2.y / r.at_T.y * r.quarantine.with_sigma(params_.sigma0);
}

double SwitchingEvaluator::w_closed_form(double t) const {
  if (params_.sigma1 != 0.0 || params_.sigma2 != params_.sigma0) {
    throw DomainError("closed-form w requires sigma1 == 0 and sigma2 == sigma0");
  }
  if (t < 0.0 || t > params_.T) throw DomainError("w requires 0 <= t <= T");
  const double g = params_.gamma;
  const EpidemicState start = prefix_.state_at(t);
  const double base = (params_.sigma0 * start.x - 1.0) / (g * start.y);
  if (t > params_.T - params_.tau) return base * std::expm1(g * (params_.T - t));
  const auto r = run({t, params_.tau});
  return r.at_t2.y / r.at_T.y * base * std::expm1(g * params_.tau);
}

std::pair<double, double> SwitchingEvaluator::w_at_joint() const {
  const auto r = run({params_.T - params_.tau, params_.tau});
  return {w_from(r, false), w_from(r, true)};
}

double SwitchingEvaluator::alpha(double t) const {
  if (t < params_.T - params_.tau || t > params_.T) {
    throw DomainError("alpha requires T - tau <= t <= T");
  }
  return alpha_from(run({t, params_.T - t}));
}

double SwitchingEvaluator::h(double t) const {
  if (t < params_.T - params_.tau || t > params_.T) {
    throw DomainError("h requires T - tau <= t <= T");
  }
  const auto r = run({t, params_.T - t});
  return r.at_T.y * r.quarantine.x_over_y;
}

double SwitchingEvaluator::dJ_dt1(const Schedule& schedule) const {
  const auto r = run(schedule);
  const double g = params_.gamma;
  const double prefactor =
      g * g * (params_.sigma2 - params_.sigma1) * r.at_T.y * r.at_t1.y * r.ratio;
  return prefactor * w_from(r, false);
}

double SwitchingEvaluator::dJ_dt1_sigma2_equals_sigma0(const Schedule& schedule) const {
  if (params_.sigma2 != params_.sigma0) throw DomainError("reduced dJ/dt1 requires sigma2 == sigma0");
  const auto r = run(schedule);
  const double g = params_.gamma;
  return r.ratio * g * g * (params_.sigma2 - params_.sigma1) * r.at_t1.y * r.at_t2.y *
         r.quarantine.with_sigma(params_.sigma2);
}

double SwitchingEvaluator::kappa_bound(const Schedule& schedule) const {
  const auto r = run(schedule);
  const double g = params_.gamma;
  return r.ratio * g * r.at_T.y * tail_factor(params_, r);
}

double SwitchingEvaluator::dJ_deta(const Schedule& schedule) const {
  return (params_.sigma2 - params_.sigma1) * (kappa_bound(schedule) - params_.kappa);
}

double SwitchingEvaluator::dJ_deta_x_over_y_form(const Schedule& schedule) const {
  const auto r = run(schedule);
  const double g = params_.gamma;
  const double spread = params_.sigma2 - params_.sigma1;
  return g * r.ratio * r.at_t2.y * spread *
             (1.0 - (params_.sigma0 - params_.sigma2) * r.at_T.y * g * r.tail.x_over_y) -
         params_.kappa * spread;
}

JtildeDerivative SwitchingEvaluator::jtilde_derivative(double t1) const {
  const double T = params_.T;
  if (t1 < 0.0 || t1 > T) throw DomainError("jtilde_derivative requires 0 <= t1 <= T");
  const bool border = t1 > T - params_.tau;
  const auto r = run(border_schedule(t1));
  const double g = params_.gamma;
  JtildeDerivative d;
  d.prefactor = g * g * (params_.sigma2 - params_.sigma1) * r.ratio * r.at_t1.y * r.at_T.y;
  d.sign_carrier = border ? w_from(r, true) - alpha_from(r) : w_from(r, false);
  return d;
}

SwitchProfile SwitchingEvaluator::profile(std::size_t n, unsigned threads) const {
  if (n < 2) throw DomainError("profile needs at least 2 points");
  const double T = params_.T;
  const double joint = T - params_.tau;
  SwitchProfile p;
  p.grid.resize(n);
  p.w_values.resize(n);
  p.tail_grid.resize(n);
  p.alpha_values.resize(n);
  p.h_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
    p.grid[i] = i + 1 == n ? T : T * frac;
    p.tail_grid[i] = i + 1 == n ? T : joint + params_.tau * frac;
  }
  parallel_for(n, threads, [&](std::size_t i) {
    p.w_values[i] = w(p.grid[i]);
    const auto r = run({p.tail_grid[i], T - p.tail_grid[i]});
    p.alpha_values[i] = alpha_from(r);
    p.h_values[i] = r.at_T.y * r.quarantine.x_over_y;
  });
  return p;
}

namespace {

// First sign change of f on [a, b] found by an n-point scan and bisection.
std::optional<double> first_crossing(const std::function<double(double)>& f, double a, double b,
                                     int n) {
  double prev_t = a;
  double prev_f = f(a);
  if (prev_f == 0.0) return a;
  for (int i = 1; i <= n; ++i) {
    const double t = i == n ? b : a + (b - a) * i / n;
    const double ft = f(t);
    if ((ft > 0.0) != (prev_f > 0.0) || ft == 0.0) {
      double lo = prev_t;
      double hi = t;
      const bool lo_positive = prev_f > 0.0;
      while (hi - lo > 1e-6 * std::max(1.0, std::abs(b))) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) > 0.0) == lo_positive ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_f = ft;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> SwitchingEvaluator::s0() const {
  const double s0v = params_.sigma0;
  return first_crossing(
      [&](double s) { return s0v * run({s, params_.tau}).at_t2.x - 1.0; }, 0.0,
      params_.T - params_.tau, 256);
}

std::optional<double> SwitchingEvaluator::s1() const {
  const double s0v = params_.sigma0;
  return first_crossing([&](double s) { return s0v * prefix_.state_at(s).x - 1.0; }, 0.0,
                        params_.T - params_.tau, 256);
}

double z_of(const ModelParams& params, const EpidemicState& initial, double t,
            const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).z(t);
}

double w_of(const ModelParams& params, const EpidemicState& initial, double t,
            const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).w(t);
}

double alpha_of(const ModelParams& params, const EpidemicState& initial, double t,
                const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).alpha(t);
}

double h_of(const ModelParams& params, const EpidemicState& initial, double t,
            const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).h(t);
}

double dJ_dt1(const ModelParams& params, const EpidemicState& initial, const Schedule& schedule,
              const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).dJ_dt1(schedule);
}

double dJ_deta(const ModelParams& params, const EpidemicState& initial, const Schedule& schedule,
               const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).dJ_deta(schedule);
}

JtildeDerivative jtilde_derivative(const ModelParams& params, const EpidemicState& initial,
                                   double t1, const IntegratorOptions& options) {
  return SwitchingEvaluator(params, initial, options).jtilde_derivative(t1);
}

}  // namespace sirq
