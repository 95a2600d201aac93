#include "sirq/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "sirq/error.hpp"
#include "sirq/objective.hpp"
#include "sirq/oracle.hpp"
#include "sirq/parallel.hpp"
#include "sirq/switching.hpp"

namespace sirq {

std::string to_string(KappaClass k) {
  switch (k) {
    case KappaClass::AlwaysPositive:
      return "always-positive";
    case KappaClass::AlwaysNegative:
      return "always-negative";
    case KappaClass::Mixed:
      return "mixed";
  }
  return "mixed";
}

std::string to_string(PlanCase c) {
  if (c == PlanCase::KappaLarge) return "kappa-large";
  if (c == PlanCase::Oracle) return "oracle";
  return std::to_string(static_cast<int>(c));
}

namespace {

// Bisection for the point where f drops from > band to <= band. The caller's
// bracket comes from the case hypotheses; if the endpoint signs disagree with
// them it is widened by `widen` once before giving up.
double bisect_descending(const std::function<double(double)>& f, double a, double b,
                         double tolerance, double widen, double domain_lo, double domain_hi,
                         const char* what) {
  auto positive = [](double v) { return dead_band_sign(v) > 0; };
  double fa = f(a);
  double fb = f(b);
  if (!positive(fa) || positive(fb)) {
    a = std::max(domain_lo, a - widen);
    b = std::min(domain_hi, b + widen);
    fa = f(a);
    fb = f(b);
    if (!positive(fa) || positive(fb)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << what << ": bracket [" << a << ", " << b << "] has values (" << fa << ", " << fb
          << "), expected a sign change from positive to non-positive";
      throw InternalError(msg.str());
    }
  }
  double lo = a;
  double hi = b;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (positive(f(mid)) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void record_objective(PlanResult& result, const ModelParams& params, const EpidemicState& initial,
                      const PlannerOptions& options) {
  result.diagnostics["J"] = objective(params, initial, result.schedule(), options.integrator);
}

}  // namespace

KappaReport check_kappa_condition(const ModelParams& params, const EpidemicState& initial,
                                  const PlannerOptions& options) {
  const SwitchingEvaluator eval(params, initial, options.integrator);
  const int n = std::max(options.kappa_grid, 2);
  std::vector<double> bounds(static_cast<std::size_t>(n) * n);
  parallel_for(bounds.size(), options.threads, [&](std::size_t idx) {
    const auto j = static_cast<int>(idx / n);
    const auto i = static_cast<int>(idx % n);
    const double eta = params.tau * j / (n - 1);
    const double t1 = (params.T - eta) * i / (n - 1);
    bounds[idx] = eval.kappa_bound({t1, eta});
  });

  KappaReport report;
  report.grid = n;
  report.bound_min = *std::min_element(bounds.begin(), bounds.end());
  report.bound_max = *std::max_element(bounds.begin(), bounds.end());
  // Samples inside the dead band do not vote: the bound scales with y(t2),
  // which underflows the band for long early quarantines even when the
  // derivative is positive everywhere in exact arithmetic.
  bool any_positive = false;
  bool any_negative = false;
  for (double b : bounds) {
    const int s = dead_band_sign((params.sigma2 - params.sigma1) * (b - params.kappa));
    any_positive = any_positive || s > 0;
    any_negative = any_negative || s < 0;
  }
  report.classification = any_positive && !any_negative   ? KappaClass::AlwaysPositive
                          : any_negative && !any_positive ? KappaClass::AlwaysNegative
                                                          : KappaClass::Mixed;
  return report;
}

PlanResult plan(const ModelParams& params, const EpidemicState& initial,
                const PlannerOptions& options) {
  params.validate();
  validate_initial(initial);

  const KappaReport kappa = check_kappa_condition(params, initial, options);
  PlanResult result;
  result.kappa_class = kappa.classification;
  result.diagnostics["kappa_bound_min"] = kappa.bound_min;
  result.diagnostics["kappa_bound_max"] = kappa.bound_max;

  if (kappa.classification == KappaClass::Mixed) {
    throw TheoremInapplicable(
        "dJ/deta changes sign over R (kappa between " + std::to_string(kappa.bound_min) + " and " +
        std::to_string(kappa.bound_max) + "); use the brute-force oracle");
  }
  if (kappa.classification == KappaClass::AlwaysNegative) {
    result.case_id = PlanCase::KappaLarge;
    result.t_star = 0.0;
    result.eta_star = 0.0;
    record_objective(result, params, initial, options);
    return result;
  }

  const SwitchingEvaluator eval(params, initial, options.integrator);
  const double T = params.T;
  const double tau = params.tau;
  const double joint = T - tau;
  const double grid_step = T / std::max(options.kappa_grid - 1, 1);

  const double w0 = eval.w(0.0);
  const auto [w_end, w_end_border] = eval.w_at_joint();
  const double alpha_end = eval.alpha(joint);
  result.diagnostics["w(0)"] = w0;
  result.diagnostics["w(T-tau)"] = w_end;
  result.diagnostics["w(T-tau)_border_branch"] = w_end_border;
  result.diagnostics["alpha(T-tau)"] = alpha_end;

  if (dead_band_sign(w0) <= 0) {
    result.case_id = PlanCase::StartImmediately;
    result.t_star = 0.0;
    result.eta_star = tau;
  } else if (dead_band_sign(w_end) <= 0) {
    result.case_id = PlanCase::InteriorStart;
    const double t_bar = bisect_descending([&](double t) { return eval.w(t); }, 0.0, joint,
                                           options.root_tolerance, grid_step, 0.0, joint, "t_bar");
    result.t_star = t_bar;
    result.eta_star = tau;
    result.diagnostics["t_bar"] = t_bar;
    result.diagnostics["w(t_bar)"] = eval.w(t_bar);
  } else if (dead_band_sign(w_end - alpha_end) <= 0) {
    result.case_id = PlanCase::EndAtHorizon;
    result.t_star = joint;
    result.eta_star = tau;
  } else {
    result.case_id = PlanCase::ShortenedAtHorizon;
    const auto gap = [&](double t) {
      const auto r = eval.jtilde_derivative(t);
      return r.sign_carrier;
    };
    const double t_tilde = bisect_descending(gap, joint, T, options.root_tolerance, grid_step,
                                             joint, T, "t_tilde");
    result.t_star = t_tilde;
    result.eta_star = T - t_tilde;
    result.diagnostics["t_tilde"] = t_tilde;
    result.diagnostics["alpha(t_tilde)"] = eval.alpha(t_tilde);
    result.diagnostics["w(t_tilde)"] = eval.w(t_tilde);
  }
  record_objective(result, params, initial, options);
  return result;
}

PlanResult plan_or_oracle(const ModelParams& params, const EpidemicState& initial,
                          const PlannerOptions& options) {
  try {
    return plan(params, initial, options);
  } catch (const TheoremInapplicable&) {
  }
  const GridResult grid = grid_search(params, initial, options.oracle_n_t1, options.oracle_n_eta,
                                      options.integrator, options.threads);
  // One grid cell in either direction covers the cell holding the maximum.
  const double radius = std::max(params.T / (options.oracle_n_t1 - 1),
                                 params.tau / (options.oracle_n_eta - 1));
  RefineOptions ro;
  ro.integrator = options.integrator;
  const RefineResult best = refine(params, initial, grid.best, radius, ro);

  PlanResult result;
  result.source = "oracle";
  result.case_id = PlanCase::Oracle;
  result.kappa_class = KappaClass::Mixed;
  result.t_star = best.schedule.t1;
  result.eta_star = best.schedule.eta;
  const KappaReport kappa = check_kappa_condition(params, initial, options);
  result.diagnostics["kappa_bound_min"] = kappa.bound_min;
  result.diagnostics["kappa_bound_max"] = kappa.bound_max;
  result.diagnostics["grid_J"] = grid.best_J;
  result.diagnostics["J"] = best.J;
  return result;
}

PlanResult plan_corollary_sigma1_zero(const ModelParams& params, const EpidemicState& initial,
                                      const PlannerOptions& options) {
  params.validate(/*allow_full_horizon=*/true);
  validate_initial(initial);
  if (params.sigma1 != 0.0 || params.sigma2 != params.sigma0 || params.kappa != 0.0) {
    throw DomainError("corollary path requires sigma1 == 0, sigma2 == sigma0 and kappa == 0");
  }

  const double T = params.T;
  const double tau = params.tau;
  const double joint = T - tau;
  const double s0 = params.sigma0;
  const double g = params.gamma;
  const PrefixCache prefix(params, initial, options.integrator);
  // x threshold for a quarantine of length d ending at T.
  const auto threshold = [&](double d) { return 1.0 / (s0 * -std::expm1(-g * d)); };

  PlanResult result;
  result.source = "corollary";
  const double x_end = prefix.state_at(joint).x;
  result.diagnostics["x(T-tau)"] = x_end;
  result.diagnostics["threshold(tau)"] = threshold(tau);

  if (initial.x <= 1.0 / s0) {
    result.case_id = PlanCase::StartImmediately;
    result.t_star = 0.0;
    result.eta_star = tau;
  } else if (x_end <= 1.0 / s0) {
    result.case_id = PlanCase::InteriorStart;
    const auto excess = [&](double t) { return s0 * prefix.state_at(t).x - 1.0; };
    result.t_star = bisect_descending(excess, 0.0, joint, options.root_tolerance, 0.0, 0.0, joint,
                                      "t_bar (corollary)");
    result.eta_star = tau;
    result.diagnostics["t_bar"] = result.t_star;
  } else if (x_end <= threshold(tau)) {
    result.case_id = PlanCase::EndAtHorizon;
    result.t_star = joint;
    result.eta_star = tau;
  } else {
    result.case_id = PlanCase::ShortenedAtHorizon;
    const auto excess = [&](double t) {
      if (t >= T) return -1.0;
      return prefix.state_at(t).x - threshold(T - t);
    };
    result.t_star = bisect_descending(excess, joint, T, options.root_tolerance, 0.0, joint, T,
                                      "t_tilde (corollary)");
    result.eta_star = T - result.t_star;
    result.diagnostics["t_tilde"] = result.t_star;
  }
  if (tau < T) record_objective(result, params, initial, options);
  return result;
}

RegimeTable regime_boundaries(const ModelParams& params, const EpidemicState& initial,
                              std::span<const double> tau_grid, const PlannerOptions& options) {
  params.validate();
  validate_initial(initial);
  for (double tau : tau_grid) {
    if (!(tau > 0.0 && tau < params.T)) {
      throw DomainError("tau grid values must lie in (0, T), got " + std::to_string(tau));
    }
  }

  RegimeTable table;
  table.rows.resize(tau_grid.size());
  PlannerOptions inner = options;
  inner.threads = 1;
  parallel_for(tau_grid.size(), options.threads, [&](std::size_t i) {
    ModelParams p = params;
    p.tau = tau_grid[i];
    const PlanResult r = plan_or_oracle(p, initial, inner);
    table.rows[i] = {p.tau, r.case_id, r.t_star, r.eta_star, r.diagnostics.at("J"), r.source};
  });

  // Both boundary conditions only involve the schedule (T - tau, tau), whose
  // quarantine ends at T; evaluate them with the widest admissible tau.
  ModelParams wide = params;
  wide.tau = std::nextafter(params.T, 0.0);
  const SwitchingEvaluator eval(wide, initial, options.integrator);
  const double T = params.T;
  const auto w_end = [&](double tau) {
    const auto r = eval.run({T - tau, tau});
    return r.quarantine.with_sigma(params.sigma0);
  };
  const auto w_minus_alpha = [&](double tau) {
    const auto r = eval.run({T - tau, tau});
    const double g = params.gamma;
    const double cost = params.kappa * (1.0 - params.sigma0 * r.x_inf) / (g * r.at_T.y * r.x_inf);
    return r.quarantine.with_sigma(params.sigma0) - (1.0 - cost) / (g * r.at_t1.y);
  };

  constexpr int kScan = 256;
  std::vector<double> taus(kScan);
  std::vector<double> g1(kScan);
  std::vector<double> g2(kScan);
  for (int k = 0; k < kScan; ++k) taus[k] = T * (k + 1) / (kScan + 1);
  parallel_for(taus.size(), options.threads, [&](std::size_t k) {
    g1[k] = w_end(taus[k]);
    g2[k] = w_minus_alpha(taus[k]);
  });

  // First rise from <= 0 to > 0 as tau grows.
  const auto locate = [&](const std::vector<double>& values,
                          const std::function<double(double)>& f) -> std::optional<double> {
    for (int k = 1; k < kScan; ++k) {
      if (dead_band_sign(values[k - 1]) <= 0 && dead_band_sign(values[k]) > 0) {
        double lo = taus[k - 1];
        double hi = taus[k];
        while (hi - lo > options.root_tolerance) {
          const double mid = 0.5 * (lo + hi);
          (dead_band_sign(f(mid)) > 0 ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    return std::nullopt;
  };
  table.tau_bar = locate(g1, w_end);
  table.tau_tilde = locate(g2, w_minus_alpha);
  if (table.tau_bar) table.t_bar = T - *table.tau_bar;
  if (table.tau_tilde) table.t_tilde = T - *table.tau_tilde;
  return table;
}

}  // namespace sirq
