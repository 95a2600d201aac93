#include "sirq/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sirq/error.hpp"
#include "sirq/objective.hpp"
#include "sirq/parallel.hpp"

namespace sirq {

GridResult grid_search(const ModelParams& params, const EpidemicState& initial, int n_t1,
                       int n_eta, const IntegratorOptions& options, unsigned threads) {
  params.validate();
  validate_initial(initial);
  if (n_t1 < 2 || n_eta < 2) throw DomainError("grid_search needs n_t1 >= 2 and n_eta >= 2");

  GridResult out;
  out.n_t1 = n_t1;
  out.n_eta = n_eta;
  out.cells.resize(static_cast<std::size_t>(n_t1) * n_eta);
  for (int j = 0; j < n_eta; ++j) {
    const double eta = j + 1 == n_eta ? params.tau : params.tau * j / (n_eta - 1);
    for (int i = 0; i < n_t1; ++i) {
      const double t1 = i + 1 == n_t1 ? params.T - eta : (params.T - eta) * i / (n_t1 - 1);
      out.cells[static_cast<std::size_t>(j) * n_t1 + i] = {t1, eta, 0.0};
    }
  }

  parallel_for(out.cells.size(), threads, [&](std::size_t k) {
    GridCell& c = out.cells[k];
    c.J = objective(params, initial, {c.t1, c.eta}, options);
  });

  const GridCell* best = &out.cells.front();
  for (const auto& c : out.cells) {
    if (c.J > best->J ||
        (c.J == best->J && (c.t1 < best->t1 || (c.t1 == best->t1 && c.eta < best->eta)))) {
      best = &c;
    }
  }
  out.best = {best->t1, best->eta};
  out.best_J = best->J;
  return out;
}

namespace {

struct Point {
  double a;
  double b;
};

Point closest_on_segment(Point p, Point u, Point v) {
  const double dx = v.a - u.a;
  const double dy = v.b - u.b;
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? ((p.a - u.a) * dx + (p.b - u.b) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return {u.a + s * dx, u.b + s * dy};
}

}  // namespace

Schedule project_to_region(const ModelParams& params, const Schedule& point) {
  const double T = params.T;
  const double tau = params.tau;
  if (point.t1 >= 0.0 && point.eta >= 0.0 && point.eta <= tau && point.t1 + point.eta <= T) {
    return point;
  }
  const std::array<Point, 4> corners{{{0.0, 0.0}, {T, 0.0}, {T - tau, tau}, {0.0, tau}}};
  const Point p{point.t1, point.eta};
  Point best{0.0, 0.0};
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const Point q = closest_on_segment(p, corners[k], corners[(k + 1) % corners.size()]);
    const double d = std::hypot(q.a - p.a, q.b - p.b);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  // Clean up rounding so the result passes validate_schedule exactly.
  const double eta = std::clamp(best.b, 0.0, tau);
  const double t1 = std::clamp(best.a, 0.0, T - eta);
  return {t1, eta};
}

RefineResult refine(const ModelParams& params, const EpidemicState& initial, const Schedule& seed,
                    double radius, const RefineOptions& options) {
  params.validate();
  validate_initial(initial);
  validate_schedule(params, seed);
  if (!(radius > 0.0)) throw DomainError("refine radius must be positive");

  RefineResult r;
  r.schedule = seed;
  r.J = objective(params, initial, seed, options.integrator);
  r.evaluations = 1;
  double step = radius;
  static constexpr std::array<std::array<double, 2>, 4> kDirections{
      {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}};

  while (step >= options.min_step && r.evaluations < options.max_evaluations) {
    Schedule best = r.schedule;
    double best_J = r.J;
    for (const auto& d : kDirections) {
      const Schedule trial = project_to_region(
          params, {r.schedule.t1 + step * d[0], r.schedule.eta + step * d[1]});
      if (trial.t1 == r.schedule.t1 && trial.eta == r.schedule.eta) continue;
      const double J = objective(params, initial, trial, options.integrator);
      ++r.evaluations;
      if (J > best_J) {
        best_J = J;
        best = trial;
      }
    }
    if (best_J > r.J) {
      r.schedule = best;
      r.J = best_J;
    } else {
      step *= 0.5;
    }
  }
  r.final_step = step;
  return r;
}

}  // namespace sirq
