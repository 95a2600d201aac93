#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sirq/integrator.hpp"
#include "sirq/model.hpp"

namespace sirq {

// Values with |v| below this are treated as zero when classifying signs.
inline constexpr double kSignDeadBand = 1e-10;

// -1, 0 or +1 with the dead band applied.
int dead_band_sign(double value, double band = kSignDeadBand) noexcept;

// The sigma2 run from the initial state, stored on a fixed node grid over
// [0, T]. A state between nodes is one partial RK4 step from the node below,
// so lookups are pure functions of t.
class PrefixCache {
 public:
  PrefixCache(const ModelParams& params, const EpidemicState& initial,
              const IntegratorOptions& options = {});

  EpidemicState state_at(double t) const;
  double node_step() const noexcept { return node_step_; }

 private:
  double gamma_ = 0.0;
  double sigma_ = 0.0;
  double node_step_ = 0.0;
  std::vector<EpidemicState> nodes_;
};

// Everything the switching formulas need from one bang-bang schedule.
struct ScheduleRun {
  Schedule schedule;
  EpidemicState at_t1;  // (x1, y1)
  EpidemicState at_t2;  // (x2, y2)
  EpidemicState at_T;
  SegmentIntegrals quarantine;  // over [t1, t2] under sigma1
  SegmentIntegrals tail;        // over [t2, T] under sigma2
  double x_inf = 0.0;
  double ratio = 0.0;  // x_inf / (1 - sigma0 x_inf)
};

// Derivative of the objective restricted to the upper border, split into a
// positive prefactor and the factor whose sign decides the optimum.
struct JtildeDerivative {
  double prefactor = 0.0;
  double sign_carrier = 0.0;

  double value() const noexcept { return prefactor * sign_carrier; }
};

struct SwitchProfile {
  std::vector<double> grid;      // over [0, T]
  std::vector<double> w_values;
  std::vector<double> tail_grid;  // over [T - tau, T]
  std::vector<double> alpha_values;
  std::vector<double> h_values;
};

// Evaluates w, z, alpha, h and the closed-form gradient of J for one
// configuration. Construction integrates the shared sigma2 prefix once;
// every query after that is const and thread-safe.
class SwitchingEvaluator {
 public:
  SwitchingEvaluator(const ModelParams& params, const EpidemicState& initial,
                     const IntegratorOptions& options = {});

  const ModelParams& params() const noexcept { return params_; }
  const EpidemicState& initial() const noexcept { return initial_; }
  const IntegratorOptions& options() const noexcept { return options_; }
  const PrefixCache& prefix() const noexcept { return prefix_; }

  ScheduleRun run(const Schedule& schedule) const;

  // Integral of (sigma0 x - 1)/y over [t, t + tau] for schedule (t, tau).
  double z(double t) const;

  // Two-branch switching function: schedule (t, tau) for t <= T - tau and
  // (t, T - t) past it.
  double w(double t) const;
  // Reduced form valid when sigma2 == sigma0.
  double w_sigma2_equals_sigma0(double t) const;
  // Closed form valid when sigma1 == 0 and sigma2 == sigma0.
  double w_closed_form(double t) const;
  // Both branch formulas evaluated at the joint t = T - tau (left, right).
  std::pair<double, double> w_at_joint() const;

  // Defined on [T - tau, T] along schedule (t, T - t).
  double alpha(double t) const;
  double h(double t) const;

  double dJ_dt1(const Schedule& schedule) const;
  // Single-integral form valid when sigma2 == sigma0.
  double dJ_dt1_sigma2_equals_sigma0(const Schedule& schedule) const;
  double dJ_deta(const Schedule& schedule) const;
  // The equivalent form written with the integral of x/y.
  double dJ_deta_x_over_y_form(const Schedule& schedule) const;
  // kappa threshold of the eta derivative: dJ/deta = (sigma2 - sigma1) (bound - kappa).
  double kappa_bound(const Schedule& schedule) const;

  JtildeDerivative jtilde_derivative(double t1) const;

  // Sampled w on [0, T] and alpha, h on [T - tau, T], n points each.
  SwitchProfile profile(std::size_t n, unsigned threads = 1) const;

  // Diagnostic crossing times of x_{t,tau}(t + tau) and x_{t,tau}(t) through
  // 1/sigma0 on [0, T - tau], when they exist.
  std::optional<double> s0() const;
  std::optional<double> s1() const;

 private:
  double w_from(const ScheduleRun& run, bool border_branch) const;
  double alpha_from(const ScheduleRun& run) const;
  Schedule border_schedule(double t) const;

  ModelParams params_;
  EpidemicState initial_;
  IntegratorOptions options_;
  PrefixCache prefix_;
};

// One-shot wrappers.
double z_of(const ModelParams& params, const EpidemicState& initial, double t,
            const IntegratorOptions& options = {});
double w_of(const ModelParams& params, const EpidemicState& initial, double t,
            const IntegratorOptions& options = {});
double alpha_of(const ModelParams& params, const EpidemicState& initial, double t,
                const IntegratorOptions& options = {});
double h_of(const ModelParams& params, const EpidemicState& initial, double t,
            const IntegratorOptions& options = {});
double dJ_dt1(const ModelParams& params, const EpidemicState& initial, const Schedule& schedule,
              const IntegratorOptions& options = {});
double dJ_deta(const ModelParams& params, const EpidemicState& initial, const Schedule& schedule,
               const IntegratorOptions& options = {});
JtildeDerivative jtilde_derivative(const ModelParams& params, const EpidemicState& initial,
                                   double t1, const IntegratorOptions& options = {});

}  // namespace sirq
