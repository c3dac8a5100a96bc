#pragma once

#include <stdexcept>
#include <string>

namespace gvb {

enum class ErrorKind {
  invalid_parameters,
  invalid_graph,
  parse_error,
  unsupported_configuration,
  domain_error,
  no_convergence,
  numeric_failure,
  size_limit,
};

const char* to_string(ErrorKind kind);

/// Base error for every failure raised by the library. The kind lets the CLI
/// map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for solver-side failures (as opposed to bad input).
  bool is_numeric() const noexcept {
    return kind_ == ErrorKind::no_convergence || kind_ == ErrorKind::numeric_failure;
  }

 private:
  ErrorKind kind_;
};

/// Raised when an iterative method hits its iteration cap. Carries the last
/// iterate so callers can report how far it got.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_value, int iterations)
      : Error(ErrorKind::no_convergence, what),
        last_value_(last_value),
        iterations_(iterations) {}

  double last_value() const noexcept { return last_value_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_value_;
  int iterations_;
};

}  // namespace gvb
