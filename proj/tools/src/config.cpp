#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sirq/error.hpp"

namespace sirq::cli {
namespace {

using nlohmann::json;

double number(const json& obj, const std::string& key, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw ConfigError(path, "missing required number");
  }
  if (!it->is_number()) throw ConfigError(path, "expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

int count(const json& obj, const std::string& key, const std::string& path, int fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = it->get<long long>();
  if (v < 2 || v > 100000) throw ConfigError(path, "must lie in [2, 100000]");
  return static_cast<int>(v);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

const json& section(const json& root, const std::string& key) {
  static const json empty = json::object();
  const auto it = root.find(key);
  if (it == root.end()) return empty;
  if (!it->is_object()) throw ConfigError(key, "expected an object");
  return *it;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ConfigError(what, "cannot parse '" + text + "' as a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config", "top level must be an object");
  reject_unknown(root,
                 {"gamma", "sigma0", "sigma1", "sigma2", "T", "tau", "kappa", "x0", "y0",
                  "integrator", "oracle", "schedule"},
                 "");

  RunConfig cfg;
  ModelParams& p = cfg.params;
  p.gamma = number(root, "gamma", "gamma");
  p.sigma0 = number(root, "sigma0", "sigma0");
  p.sigma1 = number(root, "sigma1", "sigma1");
  p.sigma2 = number(root, "sigma2", "sigma2");
  p.T = number(root, "T", "T");
  p.tau = number(root, "tau", "tau");
  p.kappa = number(root, "kappa", "kappa", 0.0);
  cfg.initial.x = number(root, "x0", "x0");
  cfg.initial.y = number(root, "y0", "y0");

  if (!(p.gamma > 0.0)) throw ConfigError("gamma", "must be > 0");
  if (!(p.sigma1 >= 0.0)) throw ConfigError("sigma1", "must be >= 0");
  if (!(p.sigma1 < p.sigma2)) throw ConfigError("sigma2", "must be > sigma1");
  if (!(p.sigma2 <= p.sigma0)) throw ConfigError("sigma0", "must be >= sigma2");
  if (!(p.T > 0.0)) throw ConfigError("T", "must be > 0");
  if (!(p.tau > 0.0 && p.tau < p.T)) throw ConfigError("tau", "must satisfy 0 < tau < T");
  if (!(p.kappa >= 0.0)) throw ConfigError("kappa", "must be >= 0");
  if (!(cfg.initial.x > 0.0)) throw ConfigError("x0", "must be > 0");
  if (!(cfg.initial.y >= kMinInitialInfected)) {
    throw ConfigError("y0", "must be >= 1e-12 (the initial infected fraction must be positive)");
  }
  if (cfg.initial.x + cfg.initial.y > 1.0 + kSimplexSlack) {
    throw ConfigError("y0", "x0 + y0 must not exceed 1");
  }

  const json& integ = section(root, "integrator");
  reject_unknown(integ, {"step", "tolerance"}, "integrator.");
  cfg.integrator.max_step = number(integ, "step", "integrator.step", 0.0);
  cfg.integrator.conservation_tolerance =
      number(integ, "tolerance", "integrator.tolerance", cfg.integrator.conservation_tolerance);
  if (cfg.integrator.max_step < 0.0) throw ConfigError("integrator.step", "must be >= 0");
  if (!(cfg.integrator.conservation_tolerance > 0.0)) {
    throw ConfigError("integrator.tolerance", "must be > 0");
  }

  const json& orc = section(root, "oracle");
  reject_unknown(orc, {"n_t1", "n_eta"}, "oracle.");
  cfg.oracle_n_t1 = count(orc, "n_t1", "oracle.n_t1", cfg.oracle_n_t1);
  cfg.oracle_n_eta = count(orc, "n_eta", "oracle.n_eta", cfg.oracle_n_eta);

  if (root.contains("schedule")) {
    const json& sch = section(root, "schedule");
    reject_unknown(sch, {"t1", "eta"}, "schedule.");
    Schedule s{number(sch, "t1", "schedule.t1"), number(sch, "eta", "schedule.eta")};
    if (!in_region(p, s)) throw ConfigError("schedule", "(t1, eta) must lie in the admissible region");
    cfg.schedule = s;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Schedule parse_schedule_override(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("--schedule-override", "expected 't1,eta'");
  return {parse_double(parts[0], "--schedule-override"),
          parse_double(parts[1], "--schedule-override")};
}

TauGrid parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("--grid", "expected 'start:stop:count'");
  TauGrid g;
  g.start = parse_double(parts[0], "--grid");
  g.stop = parse_double(parts[1], "--grid");
  const double c = parse_double(parts[2], "--grid");
  if (c < 1 || c != std::floor(c) || c > 100000) {
    throw ConfigError("--grid", "count must be a positive integer");
  }
  g.count = static_cast<int>(c);
  if (g.count > 1 && !(g.stop > g.start)) throw ConfigError("--grid", "stop must exceed start");
  return g;
}

}  // namespace sirq::cli
