#pragma once

#include <stdexcept>
#include <string>

namespace qcausal {

/// Malformed or out-of-range configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config error in '" + field + "': " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A state invariant was broken (by a law transition or an API misuse).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Quantum object whose amplitudes are all zero.
class DegenerateObjectError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid distribution or empty value range passed to a random draw.
class DistributionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qcausal
