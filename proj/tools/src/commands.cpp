#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sirq/error.hpp"
#include "sirq/final_size.hpp"
#include "sirq/objective.hpp"
#include "sirq/oracle.hpp"
#include "sirq/planner.hpp"
#include "sirq/pmp.hpp"
#include "sirq/switching.hpp"

namespace sirq::cli {

using nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Tolerances of the verify subcommand.
constexpr double kJGap = 1e-8;
constexpr double kScheduleGap = 0.05;
constexpr double kHamiltonianTolerance = 1e-5;

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("--out", "cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }

  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("--out", "cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

ordered_json params_json(const RunConfig& cfg) {
  const auto& p = cfg.params;
  return {{"gamma", p.gamma}, {"sigma0", p.sigma0}, {"sigma1", p.sigma1},
          {"sigma2", p.sigma2}, {"T", p.T},         {"tau", p.tau},
          {"kappa", p.kappa},   {"x0", cfg.initial.x}, {"y0", cfg.initial.y}};
}

ordered_json schedule_json(const Schedule& s) { return {{"t1", s.t1}, {"eta", s.eta}}; }

PlannerOptions planner_options(const RunConfig& cfg, const CommandOptions& opt) {
  PlannerOptions po;
  po.integrator = cfg.integrator;
  po.threads = opt.threads;
  po.oracle_n_t1 = cfg.oracle_n_t1;
  po.oracle_n_eta = cfg.oracle_n_eta;
  return po;
}

Schedule require_schedule(const RunConfig& cfg, const CommandOptions& opt) {
  const auto s = opt.schedule_override ? opt.schedule_override : cfg.schedule;
  if (!s) throw ConfigError("schedule", "missing; give it in the config or via --schedule-override");
  if (!in_region(cfg.params, *s)) {
    throw ConfigError("schedule", "(t1, eta) must lie in the admissible region");
  }
  return *s;
}

ordered_json plan_json(const PlanResult& r) {
  ordered_json diag = ordered_json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  return {{"t_star", r.t_star},
          {"eta_star", r.eta_star},
          {"case_id", to_string(r.case_id)},
          {"source", r.source},
          {"kappa_classification", to_string(r.kappa_class)},
          {"J", r.diagnostics.count("J") ? r.diagnostics.at("J") : std::nan("")},
          {"diagnostics", diag}};
}

std::vector<double> tau_values(const TauGrid& g) {
  std::vector<double> out(static_cast<std::size_t>(g.count));
  for (int i = 0; i < g.count; ++i) {
    out[i] = g.count == 1 ? g.start
             : i + 1 == g.count ? g.stop
                                : g.start + (g.stop - g.start) * i / (g.count - 1);
  }
  return out;
}

struct RefinedOracle {
  GridResult grid;
  RefineResult refined;
};

RefinedOracle run_oracle(const RunConfig& cfg, const CommandOptions& opt) {
  RefinedOracle o;
  o.grid = grid_search(cfg.params, cfg.initial, cfg.oracle_n_t1, cfg.oracle_n_eta, cfg.integrator,
                       opt.threads);
  const double radius = std::max(cfg.params.T / (cfg.oracle_n_t1 - 1),
                                 cfg.params.tau / (cfg.oracle_n_eta - 1));
  RefineOptions ro;
  ro.integrator = cfg.integrator;
  o.refined = refine(cfg.params, cfg.initial, o.grid.best, radius, ro);
  return o;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const Schedule s = require_schedule(cfg, opt);
  const Trajectory traj = integrate(cfg.params, cfg.initial, s, cfg.params.T, cfg.integrator);
  {
    CsvWriter csv(opt.out_dir / "trajectory.csv", {"t", "x", "y", "sigma"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
      csv.row(traj.times[i], traj.states[i].x, traj.states[i].y, traj.sigma[i]);
    }
  }
  double residual = 0.0;
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    residual = std::max(residual, conserved_residual(traj, k));
  }
  const EpidemicState end = traj.back();
  const double x_inf = x_infinity(cfg.params, end);
  ordered_json summary = {
      {"params", params_json(cfg)},
      {"schedule", schedule_json(s)},
      {"x_T", end.x},
      {"y_T", end.y},
      {"x_inf", x_inf},
      {"J", x_inf + cfg.params.kappa * control_integral(cfg.params, s)},
      {"samples", traj.size()},
      {"max_conserved_residual", residual},
  };
  write_json(opt.out_dir / "summary.json", summary);
  log << "simulate: J = " << format_number(summary["J"].get<double>()) << '\n';
  return kOk;
}

int cmd_plan(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const PlanResult r = plan_or_oracle(cfg.params, cfg.initial, planner_options(cfg, opt));
  ordered_json doc = plan_json(r);
  doc["params"] = params_json(cfg);
  write_json(opt.out_dir / "plan.json", doc);
  if (r.source == "oracle") {
    log << "plan: dJ/deta changes sign over R; theorem path inapplicable, used the oracle\n";
    log << "plan: oracle";
  } else {
    log << "plan: case " << to_string(r.case_id) << " (" << r.source << ")";
  }
  log << ", t* = " << format_number(r.t_star) << ", eta = " << format_number(r.eta_star) << '\n';
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  if (!opt.grid) throw ConfigError("--grid", "required for sweep");
  const auto taus = tau_values(*opt.grid);
  for (double t : taus) {
    if (!(t > 0.0 && t < cfg.params.T)) throw ConfigError("--grid", "tau values must lie in (0, T)");
  }
  const RegimeTable table = regime_boundaries(cfg.params, cfg.initial, taus, planner_options(cfg, opt));

  {
    CsvWriter csv(opt.out_dir / "sweep.csv", {"tau", "t_star", "eta_star", "case_id", "J", "source"});
    for (const auto& row : table.rows) {
      csv.row(row.tau, row.t_star, row.eta_star, to_string(row.case_id), row.J, row.source);
    }
  }
  {
    CsvWriter csv(opt.out_dir / "plot_tstar.csv", {"tau", "t_star"});
    for (const auto& row : table.rows) csv.row(row.tau, row.t_star);
  }
  {
    // w(T - tau) and alpha(T - tau) on the sweep grid: their crossings with 0
    // and with each other are the regime boundaries.
    CsvWriter csv(opt.out_dir / "plot_boundary.csv", {"tau", "w_end", "alpha_end"});
    std::vector<double> w(taus.size());
    std::vector<double> a(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
      ModelParams p = cfg.params;
      p.tau = taus[i];
      const SwitchingEvaluator eval(p, cfg.initial, cfg.integrator);
      w[i] = eval.w_at_joint().first;
      a[i] = eval.alpha(p.T - p.tau);
      csv.row(taus[i], w[i], a[i]);
    }
  }
  const auto opt_json = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  write_json(opt.out_dir / "boundaries.json", {{"params", params_json(cfg)},
                                               {"tau_bar", opt_json(table.tau_bar)},
                                               {"tau_tilde", opt_json(table.tau_tilde)},
                                               {"t_bar", opt_json(table.t_bar)},
                                               {"t_tilde", opt_json(table.t_tilde)}});
  log << "sweep: " << table.rows.size() << " rows";
  if (table.tau_bar) log << ", tau_bar = " << format_number(*table.tau_bar);
  if (table.tau_tilde) log << ", tau_tilde = " << format_number(*table.tau_tilde);
  log << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const PlanResult planned = plan_or_oracle(cfg.params, cfg.initial, planner_options(cfg, opt));
  const Schedule candidate = opt.schedule_override ? require_schedule(cfg, opt) : planned.schedule();
  const double candidate_J = objective(cfg.params, cfg.initial, candidate, cfg.integrator);
  const RefinedOracle oracle = run_oracle(cfg, opt);

  const PmpReport pmp = verify_necessary_conditions(cfg.params, cfg.initial, candidate, cfg.integrator);

  const Trajectory traj = integrate(cfg.params, cfg.initial, candidate, cfg.params.T, cfg.integrator);
  double residual = 0.0;
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    residual = std::max(residual, conserved_residual(traj, k));
  }
  bool monotone = true;
  bool final_size = true;
  double prev_inf = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states[i];
    if (s.y <= 0.0) monotone = false;
    if (i > 0) {
      const auto& q = traj.states[i - 1];
      if (s.x > q.x || s.x + s.y > q.x + q.y) monotone = false;
    }
    const double inf = x_infinity(cfg.params, s);
    if (i > 0 && inf < prev_inf * (1.0 - 1e-12)) final_size = false;
    if (inf >= 1.0 / cfg.params.sigma0) final_size = false;
    prev_inf = inf;
  }

  const double j_gap = std::abs(candidate_J - oracle.refined.J);
  const double schedule_gap = std::max(std::abs(candidate.t1 - oracle.refined.schedule.t1),
                                       std::abs(candidate.eta - oracle.refined.schedule.eta));
  ordered_json checks = {
      {"oracle_J_gap", j_gap <= kJGap || candidate_J >= oracle.refined.J},
      {"oracle_schedule_gap", schedule_gap <= kScheduleGap},
      {"pmp_sign_consistency", pmp.sign_contradictions == 0},
      {"pmp_sign_changes", pmp.sign_changes <= 2},
      {"pmp_hamiltonian", pmp.hamiltonian_deviation <= kHamiltonianTolerance},
      {"conservation", residual <= cfg.integrator.conservation_tolerance},
      {"monotonicity", monotone},
      {"final_size", final_size},
  };
  std::vector<std::string> failed;
  for (const auto& [name, ok] : checks.items()) {
    if (!ok.get<bool>()) failed.push_back(name);
  }

  ordered_json doc = {
      {"params", params_json(cfg)},
      {"plan", plan_json(planned)},
      {"candidate", schedule_json(candidate)},
      {"candidate_source", opt.schedule_override ? "override" : planned.source},
      {"candidate_J", candidate_J},
      {"oracle",
       {{"grid_best", schedule_json(oracle.grid.best)},
        {"grid_J", oracle.grid.best_J},
        {"refined", schedule_json(oracle.refined.schedule)},
        {"refined_J", oracle.refined.J}}},
      {"J_gap", j_gap},
      {"schedule_gap", schedule_gap},
      {"pmp",
       {{"hamiltonian_deviation", pmp.hamiltonian_deviation},
        {"sign_contradictions", pmp.sign_contradictions},
        {"contradiction_fraction", pmp.contradiction_fraction},
        {"checked_samples", pmp.checked_samples},
        {"sign_changes", pmp.sign_changes},
        {"dead_band_samples", pmp.dead_band_samples},
        {"lambda3", pmp.lambda3},
        {"constraint_active", pmp.constraint_active},
        {"complementarity_residual", pmp.complementarity_residual},
        {"multiplier_sensitive", pmp.multiplier_sensitive}}},
      {"max_conserved_residual", residual},
      {"checks", checks},
      {"failed", failed},
      {"passed", failed.empty()},
  };
  write_json(opt.out_dir / "verify.json", doc);
  if (failed.empty()) {
    log << "verify: all checks passed\n";
    return kOk;
  }
  for (const auto& name : failed) log << "verify: FAILED " << name << '\n';
  if (pmp.multiplier_sensitive) log << "verify: PMP failure is multiplier-sensitive\n";
  return kVerificationFailed;
}

int cmd_oracle(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const RefinedOracle o = run_oracle(cfg, opt);
  {
    CsvWriter csv(opt.out_dir / "oracle_grid.csv", {"t1", "eta", "J"});
    for (const auto& c : o.grid.cells) csv.row(c.t1, c.eta, c.J);
  }
  write_json(opt.out_dir / "oracle.json",
             {{"params", params_json(cfg)},
              {"n_t1", o.grid.n_t1},
              {"n_eta", o.grid.n_eta},
              {"grid_best", schedule_json(o.grid.best)},
              {"grid_J", o.grid.best_J},
              {"refined", schedule_json(o.refined.schedule)},
              {"refined_J", o.refined.J},
              {"refine_evaluations", o.refined.evaluations},
              {"refine_final_step", o.refined.final_step}});
  log << "oracle: t1 = " << format_number(o.refined.schedule.t1)
      << ", eta = " << format_number(o.refined.schedule.eta)
      << ", J = " << format_number(o.refined.J) << '\n';
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal limited-duration quarantine schedules for the controlled SIR model", "sirq"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::string override_text;
  std::string grid_text;
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--schedule-override", override_text, "candidate schedule 't1,eta'");
  app.add_option("--grid", grid_text, "tau grid 'start:stop:count' (sweep)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();

  using Command = int (*)(const RunConfig&, const CommandOptions&, std::ostream&);
  const std::vector<std::pair<std::string, Command>> commands = {
      {"simulate", cmd_simulate}, {"plan", cmd_plan},     {"sweep", cmd_sweep},
      {"verify", cmd_verify},     {"oracle", cmd_oracle}};
  const std::map<std::string, std::string> help = {
      {"simulate", "integrate one schedule, write trajectory.csv and summary.json"},
      {"plan", "optimal schedule from the case analysis (oracle fallback)"},
      {"sweep", "plan over a tau grid and locate the regime boundaries"},
      {"verify", "compare plan with the oracle and check the adjoint conditions"},
      {"oracle", "brute-force grid search plus refinement"}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    CommandOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    if (!override_text.empty()) opt.schedule_override = parse_schedule_override(override_text);
    if (!grid_text.empty()) opt.grid = parse_grid(grid_text);
    std::filesystem::create_directories(opt.out_dir);
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) return fn(cfg, opt, out);
    }
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace sirq::cli
