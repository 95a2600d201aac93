#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "fixtures.hpp"
#include "sirq/final_size.hpp"
#include "sirq/objective.hpp"

using namespace sirq;
using namespace sirq::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kTmp = SIRQ_TEST_TMP;

json base_config(double tau = 60.0) {
  return {{"gamma", 0.01}, {"sigma0", 1.5}, {"sigma1", 0.0}, {"sigma2", 1.5},
          {"T", 2600},     {"tau", tau},    {"kappa", 0},    {"x0", 0.999999},
          {"y0", 1e-6},    {"oracle", {{"n_t1", 100}, {"n_eta", 25}}}};
}

fs::path write_config(const std::string& name, const json& cfg) {
  fs::create_directories(kTmp);
  const fs::path path = kTmp / (name + ".json");
  std::ofstream(path) << cfg.dump(2);
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("valid") {
    const RunConfig cfg = parse_config(base_config().dump());
    CHECK(cfg.params.sigma0 == 1.5);
    CHECK(cfg.params.tau == 60.0);
    CHECK(cfg.initial.y == 1e-6);
    CHECK(cfg.oracle_n_t1 == 100);
    CHECK_FALSE(cfg.schedule);
  }
  SUBCASE("errors name the field") {
    const auto field_of = [](const json& j) {
      try {
        parse_config(j.dump());
      } catch (const ConfigError& e) {
        return e.field();
      }
      return std::string("<none>");
    };
    json j = base_config();
    j["y0"] = 0.0;
    CHECK(field_of(j) == "y0");
    j = base_config();
    j.erase("gamma");
    CHECK(field_of(j) == "gamma");
    j = base_config();
    j["sigma1"] = "zero";
    CHECK(field_of(j) == "sigma1");
    j = base_config();
    j["unexpected"] = 1;
    CHECK(field_of(j) == "unexpected");
    j = base_config();
    j["oracle"]["n_eta"] = 1;
    CHECK(field_of(j).find("n_eta") != std::string::npos);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  }
  SUBCASE("schedule override and grid") {
    const Schedule s = parse_schedule_override("2527.1,60");
    CHECK(s.t1 == 2527.1);
    CHECK(s.eta == 60.0);
    CHECK_THROWS_AS(parse_schedule_override("1,2,3"), ConfigError);
    CHECK_THROWS_AS(parse_schedule_override("abc"), ConfigError);
    const TauGrid g = parse_grid("10:400:40");
    CHECK(g.start == 10.0);
    CHECK(g.stop == 400.0);
    CHECK(g.count == 40);
    CHECK_THROWS_AS(parse_grid("10:400"), ConfigError);
    CHECK_THROWS_AS(parse_grid("10:400:0"), ConfigError);
  }
}

TEST_CASE("exit codes") {
  SUBCASE("zero infected fraction is a config error naming y0") {
    json j = base_config();
    j["y0"] = 0.0;
    const Run r = invoke({"simulate", "--config", write_config("y0", j).string(), "--out", (kTmp / "y0").string()});
    CHECK(r.code == kConfigError);
    CHECK(r.err.find("y0") != std::string::npos);
  }
  SUBCASE("missing config option") {
    CHECK(invoke({"plan"}).code == kConfigError);
  }
  SUBCASE("missing file") {
    CHECK(invoke({"plan", "--config", (kTmp / "absent.json").string()}).code == kConfigError);
  }
  SUBCASE("simulate without a schedule") {
    const Run r = invoke({"simulate", "--config", write_config("nosched", base_config()).string(), "--out",
                       (kTmp / "nosched").string()});
    CHECK(r.code == kConfigError);
  }
  SUBCASE("sweep grid outside (0, T)") {
    const Run r = invoke({"sweep", "--config", write_config("badgrid", base_config()).string(), "--grid",
                       "0:100:3", "--out", (kTmp / "badgrid").string()});
    CHECK(r.code == kConfigError);
  }
}

TEST_CASE("simulate round trip") {
  json j = base_config();
  j["schedule"] = {{"t1", 2527.1}, {"eta", 60}};
  const fs::path out = kTmp / "sim";
  REQUIRE(invoke({"simulate", "--config", write_config("sim", j).string(), "--out", out.string()}).code == kOk);
  const json summary = json::parse(slurp(out / "summary.json"));
  const RunConfig cfg = parse_config(j.dump());
  CHECK(std::abs(summary["J"].get<double>() - objective(cfg.params, cfg.initial, {2527.1, 60.0})) <= 1e-10);

  const auto rows = read_csv(out / "trajectory.csv");
  REQUIRE(rows.size() > 2);
  CHECK(rows.front() == std::vector<std::string>{"t", "x", "y", "sigma"});
  const auto& last = rows.back();
  const EpidemicState end{std::stod(last[1]), std::stod(last[2])};
  CHECK(std::stod(last[0]) == 2600.0);
  CHECK(std::abs(end.x - summary["x_T"].get<double>()) <= 1e-12);
  CHECK(std::abs(end.y - summary["y_T"].get<double>()) <= 1e-12);
  CHECK(std::abs(x_infinity(cfg.params, end) - summary["x_inf"].get<double>()) <= 1e-12);
  CHECK(summary["max_conserved_residual"].get<double>() <= 1e-9);
}

TEST_CASE("zero-length quarantine matches the uncontrolled run") {
  json j = base_config();
  j["schedule"] = {{"t1", 1000}, {"eta", 0}};
  const fs::path out = kTmp / "eta0";
  REQUIRE(invoke({"simulate", "--config", write_config("eta0", j).string(), "--out", out.string()}).code == kOk);
  const RunConfig cfg = parse_config(j.dump());
  const EpidemicState end = advance(cfg.params, cfg.initial, 0.0, cfg.params.T, cfg.params.sigma2, {});
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary["x_inf"].get<double>() == doctest::Approx(x_infinity(cfg.params, end)).epsilon(1e-10));
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  const fs::path cfg = write_config("det", base_config(260.0));
  std::string reference_plan;
  std::string reference_grid;
  for (const char* threads : {"1", "4"}) {
    const fs::path out = kTmp / (std::string("det") + threads);
    REQUIRE(invoke({"plan", "--config", cfg.string(), "--out", out.string(), "--threads", threads}).code == kOk);
    REQUIRE(invoke({"oracle", "--config", cfg.string(), "--out", out.string(), "--threads", threads}).code == kOk);
    const std::string plan = slurp(out / "plan.json");
    const std::string grid = slurp(out / "oracle_grid.csv");
    if (reference_plan.empty()) {
      reference_plan = plan;
      reference_grid = grid;
    }
    CHECK(plan == reference_plan);
    CHECK(grid == reference_grid);
  }
  CHECK(json::parse(reference_plan)["case_id"] == "4");
}

TEST_CASE("sweep") {
  SUBCASE("single-point grid gives one row") {
    const fs::path out = kTmp / "sweep1";
    REQUIRE(invoke({"sweep", "--config", write_config("sweep1", base_config()).string(), "--grid", "120:120:1",
                 "--out", out.string()})
                .code == kOk);
    const auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "tau");
    CHECK(std::stod(rows[1][0]) == 120.0);
    CHECK(std::stod(rows[1][1]) == 2480.0);
    CHECK(read_csv(out / "plot_tstar.csv").size() == 2);
  }
  SUBCASE("boundaries are bracketed by the grid") {
    const fs::path out = kTmp / "sweep8";
    REQUIRE(invoke({"sweep", "--config", write_config("sweep8", base_config()).string(), "--grid", "10:400:8",
                 "--out", out.string()})
                .code == kOk);
    CHECK(read_csv(out / "sweep.csv").size() == 9);
    const json b = json::parse(slurp(out / "boundaries.json"));
    CHECK(std::abs(b["tau_bar"].get<double>() - 72.9) <= 0.5);
    CHECK(std::abs(b["tau_tilde"].get<double>() - 212.2) <= 0.5);
  }
}

TEST_CASE("mixed cost sign falls back to the oracle") {
  json j = base_config(180.0);
  j["sigma0"] = 2.2;
  j["sigma1"] = 0.3;
  j["T"] = 3200;
  j["kappa"] = 1e-5;
  const fs::path out = kTmp / "mixed";
  const Run r = invoke({"plan", "--config", write_config("mixed", j).string(), "--out", out.string()});
  REQUIRE(r.code == kOk);
  const json plan = json::parse(slurp(out / "plan.json"));
  CHECK(plan["source"] == "oracle");
  CHECK(plan["kappa_classification"] == "mixed");
  CHECK(r.out.find("oracle") != std::string::npos);
}

TEST_CASE("verify") {
  SUBCASE("baseline passes") {
    const fs::path out = kTmp / "verify_ok";
    const Run r = invoke({"verify", "--config", write_config("verify_ok", base_config()).string(), "--out",
                       out.string()});
    CHECK(r.code == kOk);
    CHECK(json::parse(slurp(out / "verify.json"))["passed"] == true);
  }
  SUBCASE("perturbed schedule fails the adjoint check") {
    const fs::path out = kTmp / "verify_bad";
    const Run r = invoke({"verify", "--config", write_config("verify_bad", base_config()).string(), "--out",
                       out.string(), "--schedule-override", "2540,60"});
    CHECK(r.code == kVerificationFailed);
    CHECK(r.out.find("pmp_sign_consistency") != std::string::npos);
    const json doc = json::parse(slurp(out / "verify.json"));
    CHECK(doc["pmp"]["sign_contradictions"].get<int>() > 0);
    CHECK(doc["candidate_source"] == "override");
  }
  SUBCASE("large cost keeps the quarantine off and passes") {
    json j = base_config(100.0);
    j["sigma1"] = 0.3;
    j["kappa"] = 0.05;
    const fs::path out = kTmp / "verify_kappa";
    const Run r = invoke({"verify", "--config", write_config("verify_kappa", j).string(), "--out", out.string()});
    CHECK(r.code == kOk);
    const json doc = json::parse(slurp(out / "verify.json"));
    CHECK(doc["plan"]["eta_star"].get<double>() == 0.0);
    CHECK(doc["oracle"]["refined"]["eta"].get<double>() == 0.0);
  }
}
