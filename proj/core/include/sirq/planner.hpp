#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sirq/integrator.hpp"
#include "sirq/model.hpp"

namespace sirq {

enum class KappaClass { AlwaysPositive, AlwaysNegative, Mixed };

std::string to_string(KappaClass k);

struct KappaReport {
  KappaClass classification = KappaClass::Mixed;
  // Extremes over the grid of the kappa threshold of dJ/deta.
  double bound_min = 0.0;
  double bound_max = 0.0;
  int grid = 0;
};

// Which branch of the characterization produced the schedule.
enum class PlanCase {
  StartImmediately = 1,    // w(0) <= 0
  InteriorStart = 2,       // w(0) > 0 >= w(T - tau)
  EndAtHorizon = 3,        // 0 < w(T - tau) <= alpha(T - tau)
  ShortenedAtHorizon = 4,  // w(T - tau) > alpha(T - tau)
  KappaLarge = 5,          // cost dominates: no hard quarantine
  Oracle = 6,              // brute-force fallback, no theorem case
};

// "1".."4", "kappa-large" or "oracle".
std::string to_string(PlanCase c);

struct PlanResult {
  double t_star = 0.0;
  double eta_star = 0.0;
  PlanCase case_id = PlanCase::StartImmediately;
  // "theorem", "corollary" or "oracle".
  std::string source = "theorem";
  KappaClass kappa_class = KappaClass::AlwaysPositive;
  std::map<std::string, double> diagnostics;

  Schedule schedule() const noexcept { return {t_star, eta_star}; }
};

struct PlannerOptions {
  IntegratorOptions integrator;
  // Absolute time tolerance of the bisection for t_bar and t_tilde. Much
  // tighter than the 1e-4 needed for the schedule itself: with sigma1 = 0
  // the switching function is flat on the quarantine of a case-2 optimum
  // and the adjoint check sees any error in t_bar.
  double root_tolerance = 1e-8;
  // Side of the uniform grid over R used to classify the sign of dJ/deta.
  int kappa_grid = 64;
  unsigned threads = 1;
  // Oracle settings used by plan_or_oracle.
  int oracle_n_t1 = 100;
  int oracle_n_eta = 25;
};

// Classifies the sign of dJ/deta over a kappa_grid x kappa_grid grid on R.
KappaReport check_kappa_condition(const ModelParams& params, const EpidemicState& initial,
                                  const PlannerOptions& options = {});

// Optimal (t*, eta) from the four-case characterization. Returns eta = 0
// with case KappaLarge when dJ/deta < 0 on the whole grid and throws
// TheoremInapplicable when its sign is mixed.
PlanResult plan(const ModelParams& params, const EpidemicState& initial,
                const PlannerOptions& options = {});

// plan, or grid_search + refine when the theorem path is inapplicable.
PlanResult plan_or_oracle(const ModelParams& params, const EpidemicState& initial,
                          const PlannerOptions& options = {});

// Same optimum for sigma1 = 0, sigma2 = sigma0, kappa = 0, computed from the
// susceptible-fraction thresholds 1/sigma0 and 1/(sigma0 (1 - e^{-gamma tau})).
// Accepts tau == T.
PlanResult plan_corollary_sigma1_zero(const ModelParams& params, const EpidemicState& initial,
                                      const PlannerOptions& options = {});

struct RegimeRow {
  double tau = 0.0;
  PlanCase case_id = PlanCase::StartImmediately;
  double t_star = 0.0;
  double eta_star = 0.0;
  double J = 0.0;
  std::string source = "theorem";
};

struct RegimeTable {
  std::vector<RegimeRow> rows;
  // Durations where w(T - tau) crosses 0 and alpha(T - tau).
  std::optional<double> tau_bar;
  std::optional<double> tau_tilde;
  std::optional<double> t_bar;    // T - tau_bar
  std::optional<double> t_tilde;  // T - tau_tilde
};

// Runs plan_or_oracle for every tau in the grid and locates the crossover durations.
RegimeTable regime_boundaries(const ModelParams& params, const EpidemicState& initial,
                              std::span<const double> tau_grid, const PlannerOptions& options = {});

}  // namespace sirq
