#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdfrac {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Invalid or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A request the implementation deliberately does not support
/// (e.g. comparing fields on non-nested grids).
class UnsupportedConfiguration : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values produced during force assembly or time stepping.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string &what, std::size_t node, std::size_t step)
      : std::runtime_error(what), node_(node), step_(step) {}
  std::size_t node() const { return node_; }
  std::size_t step() const { return step_; }

private:
  std::size_t node_;
  std::size_t step_;
};

} // namespace pdfrac
