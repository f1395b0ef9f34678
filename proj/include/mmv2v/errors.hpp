#pragma once

#include <stdexcept>
#include <string>

namespace mmv2v {

// Raised when a config document cannot be parsed at all.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a parsed value violates a model invariant. `field` names the
// offending key using config-style dotted paths, e.g. "road.tall_fraction".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Raised when an interference series hits its term cap without meeting the
// requested relative tail tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double tolerance, const std::string& what)
      : std::runtime_error(what), tolerance_(tolerance) {}
  double tolerance() const noexcept { return tolerance_; }

 private:
  double tolerance_;
};

// Raised for simulation-level failures (e.g. no transmitter after retries).
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for file I/O failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmv2v
