#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "sirq/error.hpp"
#include "sirq/integrator.hpp"
#include "sirq/objective.hpp"
#include "sirq/oracle.hpp"
#include "sirq/planner.hpp"

using namespace sirq;
using fixtures::kInitial;

namespace {

// Central difference of J in eta, independent of the closed-form gradient.
double fd_eta(const ModelParams& p, const Schedule& s, double h = 1e-3) {
  return (objective(p, kInitial, {s.t1, s.eta + h}) - objective(p, kInitial, {s.t1, s.eta - h})) /
         (2.0 * h);
}

}  // namespace

TEST_CASE("four cases on the baseline") {
  SUBCASE("short quarantine starts in the interior") {
    const PlanResult r = plan(fixtures::baseline(60.0), kInitial);
    CHECK(r.case_id == PlanCase::InteriorStart);
    CHECK(r.source == "theorem");
    CHECK(std::abs(r.t_star - 2527.1) <= 0.5);
    CHECK(r.eta_star == 60.0);
  }
  SUBCASE("medium quarantine ends at the horizon") {
    const PlanResult r = plan(fixtures::baseline(120.0), kInitial);
    CHECK(r.case_id == PlanCase::EndAtHorizon);
    CHECK(r.t_star == 2480.0);
    CHECK(r.eta_star == 120.0);
  }
  SUBCASE("long quarantine is shortened") {
    const PlanResult r = plan(fixtures::baseline(260.0), kInitial);
    CHECK(r.case_id == PlanCase::ShortenedAtHorizon);
    CHECK(std::abs(r.t_star - 2387.8) <= 0.5);
    CHECK(r.t_star + r.eta_star == doctest::Approx(2600.0));
    CHECK(std::abs(r.eta_star - 212.2) <= 0.5);
  }
  SUBCASE("susceptibles already below the threshold") {
    const EpidemicState low{0.6, 1e-4};
    const PlanResult r = plan(fixtures::baseline(60.0), low);
    CHECK(r.case_id == PlanCase::StartImmediately);
    CHECK(r.t_star == 0.0);
    CHECK(r.eta_star == 60.0);
  }
}

TEST_CASE("diagnostics are populated") {
  const PlanResult r = plan(fixtures::baseline(60.0), kInitial);
  for (const char* key : {"w(0)", "w(T-tau)", "alpha(T-tau)", "t_bar", "J"}) {
    CHECK(r.diagnostics.count(key) == 1);
  }
  CHECK(r.diagnostics.at("w(0)") > 0.0);
  CHECK(r.diagnostics.at("w(T-tau)") <= 0.0);
  CHECK(std::abs(r.diagnostics.at("w(t_bar)")) < 1e-6);
  CHECK(r.diagnostics.at("J") == objective(fixtures::baseline(60.0), kInitial, r.schedule()));
}

TEST_CASE("kappa condition") {
  SUBCASE("zero cost with sigma2 = sigma0 is always positive") {
    for (double tau : {30.0, 150.0}) {
      const KappaReport k = check_kappa_condition(fixtures::baseline(tau), kInitial);
      CHECK(k.classification == KappaClass::AlwaysPositive);
      CHECK(k.bound_min > 0.0);
      CHECK(k.grid == 64);
    }
  }
  SUBCASE("ten times the largest bound is always negative") {
    ModelParams p = fixtures::partial(100.0);
    const KappaReport base = check_kappa_condition(p, kInitial);
    REQUIRE(base.bound_max > 0.0);
    p.kappa = 10.0 * base.bound_max;
    CHECK(check_kappa_condition(p, kInitial).classification == KappaClass::AlwaysNegative);
    const PlanResult r = plan(p, kInitial);
    CHECK(r.case_id == PlanCase::KappaLarge);
    CHECK(r.eta_star == 0.0);
  }
  SUBCASE("general configuration straddles the cost weight") {
    // Both signs of dJ/deta occur on R here, which finite differences of J
    // confirm independently of the closed-form bound.
    const ModelParams p = fixtures::general(180.0);
    const KappaReport k = check_kappa_condition(p, kInitial);
    CHECK(k.classification == KappaClass::Mixed);
    CHECK(k.bound_min < p.kappa);
    CHECK(k.bound_max > p.kappa);
    bool positive = false;
    bool negative = false;
    for (int j = 1; j < 8; ++j) {
      const double eta = p.tau * j / 8.0;
      for (int i = 0; i < 8; ++i) {
        const double d = fd_eta(p, {(p.T - eta) * i / 7.0 * 0.999, eta});
        positive = positive || d > 1e-9;
        negative = negative || d < -1e-9;
      }
    }
    CHECK(positive);
    CHECK(negative);
    CHECK_THROWS_AS(plan(p, kInitial), TheoremInapplicable);
  }
}

TEST_CASE("oracle fallback for a mixed configuration") {
  const ModelParams p = fixtures::general(180.0);
  PlannerOptions opt;
  opt.threads = 0;
  const PlanResult r = plan_or_oracle(p, kInitial, opt);
  CHECK(r.source == "oracle");
  CHECK(r.case_id == PlanCase::Oracle);
  CHECK(r.diagnostics.at("J") >= r.diagnostics.at("grid_J"));
  CHECK(in_region(p, r.schedule()));
}

TEST_CASE("corollary agrees with the general planner") {
  for (double tau : {20.0, 60.0, 100.0, 200.0, 300.0, 500.0}) {
    CAPTURE(tau);
    const ModelParams p = fixtures::baseline(tau);
    const PlanResult a = plan(p, kInitial);
    const PlanResult b = plan_corollary_sigma1_zero(p, kInitial);
    CHECK(a.case_id == b.case_id);
    CHECK(b.source == "corollary");
    CHECK(std::abs(a.t_star - b.t_star) <= 1e-3);
    CHECK(std::abs(a.eta_star - b.eta_star) <= 1e-3);
  }
}

TEST_CASE("corollary edge cases") {
  SUBCASE("full-horizon quarantine reduces to the shortened case") {
    ModelParams p = fixtures::baseline(2600.0);
    const PlanResult full = plan_corollary_sigma1_zero(p, kInitial);
    CHECK(full.case_id == PlanCase::ShortenedAtHorizon);
    // t_tilde does not depend on tau once tau exceeds tau_tilde.
    p.tau = 2000.0;
    CHECK(std::abs(full.t_star - plan(p, kInitial).t_star) <= 1e-3);
  }
  SUBCASE("full horizon short enough to use in full") {
    ModelParams p = fixtures::baseline(100.0);
    p.T = 100.0;
    const PlanResult r = plan_corollary_sigma1_zero(p, kInitial);
    CHECK(r.case_id == PlanCase::EndAtHorizon);
    CHECK(r.t_star == 0.0);
    CHECK(r.eta_star == 100.0);
  }
  SUBCASE("x(T - tau) just above 1/sigma0 is the horizon case") {
    const double t_bar = plan(fixtures::baseline(60.0), kInitial).t_star;
    const ModelParams p = fixtures::baseline(2600.0 - t_bar + 0.01);
    const PlanResult r = plan_corollary_sigma1_zero(p, kInitial);
    CHECK(r.case_id == PlanCase::EndAtHorizon);
    CHECK(r.t_star == doctest::Approx(p.T - p.tau));
    CHECK(plan(p, kInitial).case_id == PlanCase::EndAtHorizon);
  }
  SUBCASE("precondition") {
    CHECK_THROWS_AS(plan_corollary_sigma1_zero(fixtures::partial(60.0), kInitial), DomainError);
  }
}

TEST_CASE("effective reproduction number is one at t_bar") {
  for (double tau : {10.0, 40.0, 70.0}) {
    CAPTURE(tau);
    const ModelParams p = fixtures::baseline(tau);
    const PlanResult r = plan(p, kInitial);
    REQUIRE(r.case_id == PlanCase::InteriorStart);
    const EpidemicState at = advance(p, kInitial, 0.0, r.t_star, p.sigma2, {});
    CHECK(std::abs(p.sigma0 * at.x - 1.0) <= 1e-6);
  }
}

TEST_CASE("case sequence is monotone in tau") {
  std::vector<double> taus;
  for (int i = 0; i < 16; ++i) taus.push_back(10.0 + 25.0 * i);
  for (const ModelParams& p : {fixtures::baseline(), fixtures::partial()}) {
    PlannerOptions opt;
    opt.threads = 0;
    const RegimeTable table = regime_boundaries(p, kInitial, taus, opt);
    REQUIRE(table.rows.size() == taus.size());
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      CHECK(static_cast<int>(table.rows[i].case_id) >= static_cast<int>(table.rows[i - 1].case_id));
    }
    CHECK(table.rows.front().case_id == PlanCase::InteriorStart);
    CHECK(table.rows.back().case_id == PlanCase::ShortenedAtHorizon);
    REQUIRE(table.tau_bar);
    REQUIRE(table.tau_tilde);
    CHECK(*table.tau_bar < *table.tau_tilde);
    CHECK(*table.t_bar == doctest::Approx(p.T - *table.tau_bar));
  }
}

TEST_CASE("t_tilde is independent of tau past tau_tilde") {
  for (const ModelParams& base : {fixtures::baseline(), fixtures::partial()}) {
    double first = -1.0;
    for (double tau : {300.0, 400.0, 800.0, 1500.0}) {
      ModelParams p = base;
      p.tau = tau;
      const PlanResult r = plan(p, kInitial);
      REQUIRE(r.case_id == PlanCase::ShortenedAtHorizon);
      if (first < 0.0) first = r.t_star;
      CHECK(std::abs(r.t_star - first) <= 1e-6);
    }
  }
}

TEST_CASE("planner matches the oracle") {
  for (const ModelParams& p : {fixtures::baseline(100.0), fixtures::partial(160.0)}) {
    const PlanResult r = plan(p, kInitial);
    const GridResult grid = grid_search(p, kInitial, 200, 50, {}, 0);
    const double radius = std::max(p.T / 199.0, p.tau / 49.0);
    CHECK(std::abs(grid.best.t1 - r.t_star) <= radius);
    const RefineResult refined = refine(p, kInitial, grid.best, radius);
    CHECK(std::abs(refined.J - r.diagnostics.at("J")) <= 1e-8);
    CHECK(std::abs(refined.schedule.t1 - r.t_star) <= 0.05);
    CHECK(std::abs(refined.schedule.eta - r.eta_star) <= 0.05);
  }
}

TEST_CASE("invalid tau grid") {
  const std::vector<double> bad{10.0, 2600.0};
  CHECK_THROWS_AS(regime_boundaries(fixtures::baseline(), kInitial, bad), DomainError);
}
