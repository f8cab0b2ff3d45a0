#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace gpentropy {

/// Failure categories shared by every module. The CLI maps these onto exit
/// codes, so new kinds must also be added to `exit_code_for`.
enum class ErrorKind {
  invalid_spec,
  not_positive_definite,
  below_floor,
  domain_error,
  singular_density,
  no_convergence,
  size_limit,
  bad_alpha,
  lag_out_of_range,
  parse_error,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec: return "InvalidSpec";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::below_floor: return "BelowFloor";
    case ErrorKind::domain_error: return "DomainError";
    case ErrorKind::singular_density: return "SingularDensity";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::size_limit: return "SizeLimit";
    case ErrorKind::bad_alpha: return "BadAlpha";
    case ErrorKind::lag_out_of_range: return "LagOutOfRange";
    case ErrorKind::parse_error: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& what)
      : Error(ErrorKind::invalid_spec, what) {}
};

/// Raised by the triangular factorization; `pivot` is the zero-based row at
/// which a non-positive pivot appeared.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::int64_t pivot, const std::string& what)
      : Error(ErrorKind::not_positive_definite, what), pivot_(pivot) {}

  std::int64_t pivot() const noexcept { return pivot_; }

 private:
  std::int64_t pivot_;
};

class BelowFloor : public Error {
 public:
  BelowFloor(double eigenvalue, double threshold, const std::string& what)
      : Error(ErrorKind::below_floor, what),
        eigenvalue_(eigenvalue),
        threshold_(threshold) {}

  double eigenvalue() const noexcept { return eigenvalue_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double eigenvalue_;
  double threshold_;
};

class DomainError : public Error {
 public:
  DomainError(double eigenvalue, const std::string& what)
      : Error(ErrorKind::domain_error, what), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// The spectral density has an eigenvalue at or below the floor at `theta`,
/// so the log-spectral integral (and every entropy rate) is minus infinity.
class SingularDensity : public Error {
 public:
  SingularDensity(double theta, double eigenvalue, const std::string& what)
      : Error(ErrorKind::singular_density, what),
        theta_(theta),
        eigenvalue_(eigenvalue) {}

  double theta() const noexcept { return theta_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double theta_;
  double eigenvalue_;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what)
      : Error(ErrorKind::no_convergence, what) {}
};

class SizeLimit : public Error {
 public:
  SizeLimit(std::uint64_t requested, std::uint64_t cap, const std::string& what)
      : Error(ErrorKind::size_limit, what), requested_(requested), cap_(cap) {}

  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t requested_;
  std::uint64_t cap_;
};

class BadAlpha : public Error {
 public:
  BadAlpha(double alpha, const std::string& what)
      : Error(ErrorKind::bad_alpha, what), alpha_(alpha) {}

  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

class LagOutOfRange : public Error {
 public:
  explicit LagOutOfRange(const std::string& what)
      : Error(ErrorKind::lag_out_of_range, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorKind::parse_error, what) {}
};

}  // namespace gpentropy
