#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "sirq/integrator.hpp"
#include "sirq/model.hpp"

namespace sirq::cli {

// Malformed or invalid configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  ModelParams params;
  EpidemicState initial;
  IntegratorOptions integrator;
  int oracle_n_t1 = 400;
  int oracle_n_eta = 100;
  std::optional<Schedule> schedule;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// "t1,eta"
Schedule parse_schedule_override(const std::string& text);

struct TauGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
};

// "start:stop:count"; count == 1 yields just `start`.
TauGrid parse_grid(const std::string& text);

}  // namespace sirq::cli
