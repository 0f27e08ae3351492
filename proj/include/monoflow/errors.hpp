#pragma once

#include <stdexcept>
#include <string>

namespace monoflow {

// Exit-code contract: configuration/usage problems -> 2, iterative solvers
// failing to converge -> 3, filesystem problems -> 4.
class Error : public std::runtime_error {
 public:
  Error(const std::string& msg, int code) : std::runtime_error(msg), code_(code) {}
  int exit_code() const { return code_; }

 private:
  int code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(m, 2) {}
};
struct NonConvergence : Error {
  explicit NonConvergence(const std::string& m) : Error(m, 3) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(m, 4) {}
};

// Specific configuration failures, kept as distinct types so tests can
// assert on them.
struct NoEvaluator : ConfigError {
  explicit NoEvaluator(const std::string& m) : ConfigError(m) {}
};
struct NoConjugate : ConfigError {
  explicit NoConjugate(const std::string& m) : ConfigError(m) {}
};
struct UnsupportedSetShape : ConfigError {
  explicit UnsupportedSetShape(const std::string& m) : ConfigError(m) {}
};
struct InfeasibleStart : ConfigError {
  explicit InfeasibleStart(const std::string& m) : ConfigError(m) {}
};
struct NonPositiveSchedule : ConfigError {
  explicit NonPositiveSchedule(const std::string& m) : ConfigError(m) {}
};
struct StepTooLarge : ConfigError {
  explicit StepTooLarge(const std::string& m) : ConfigError(m) {}
};
struct NonZeroMeanForcing : ConfigError {
  explicit NonZeroMeanForcing(const std::string& m) : ConfigError(m) {}
};

}  // namespace monoflow
