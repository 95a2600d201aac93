#pragma once

#include <stdexcept>
#include <string>

namespace sirq {

// Input outside the admissible domain (parameters, initial state or schedule).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The integrator produced a non-finite or non-positive state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

// The planner was asked for a configuration outside both theorem paths.
class TheoremInapplicable : public std::runtime_error {
 public:
  explicit TheoremInapplicable(const std::string& what) : std::runtime_error(what) {}
};

// A condition that valid inputs cannot trigger (lost bracket, etc.).
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sirq
