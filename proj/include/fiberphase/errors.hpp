#pragma once

#include <stdexcept>
#include <string>

namespace fiberphase {

/// Input outside the mathematical domain of an operation (negative wavelength, N < 1, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Two spools that must share a geometry do not.
class GeometryMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Successive refinements of a numerical scheme disagree by more than the tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double last_difference)
      : std::runtime_error(what), last_difference_(last_difference) {}
  double last_difference() const noexcept { return last_difference_; }

private:
  double last_difference_;
};

/// Calibration and measured probability coincide, so no finite integration time exists.
class NoSignalError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class InsufficientData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario or table ingestion failure. `field` names the offending key, `line` is 1-based (0 if unknown).
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& field, int line, const std::string& message)
      : std::runtime_error(format(field, line, message)), field_(field), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

private:
  static std::string format(const std::string& field, int line, const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "'" + field + "': ";
    return out + message;
  }

  std::string field_;
  int line_;
};

}  // namespace fiberphase
