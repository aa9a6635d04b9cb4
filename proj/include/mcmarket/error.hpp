#pragma once

#include <stdexcept>
#include <string>

namespace mcmarket {

// Error families map one-to-one onto CLI exit codes: DataError -> 2,
// NumericError -> 3. DomainError and RegimeError are contract violations
// raised by the library when called outside an operation's domain.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class RegimeError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  explicit DataError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  long line() const noexcept { return line_; }

private:
  long line_;
};

class NumericError : public Error {
public:
  using Error::Error;
};

/// Root bracket without a sign change; carries both end residuals.
class NoEquilibriumError : public NumericError {
public:
  NoEquilibriumError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
      : NumericError(what), lo_(lo), hi_(hi), f_lo_(f_lo), f_hi_(f_hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double f_lo() const noexcept { return f_lo_; }
  double f_hi() const noexcept { return f_hi_; }

private:
  double lo_, hi_, f_lo_, f_hi_;
};

/// A stepper stage produced a non-finite slope at (t, value).
class NonFiniteSlopeError : public NumericError {
public:
  NonFiniteSlopeError(const std::string& what, double t, double value)
      : NumericError(what), t_(t), value_(value) {}

  double t() const noexcept { return t_; }
  double value() const noexcept { return value_; }

private:
  double t_, value_;
};

/// Raised when the profit frontier is undefined: prices fall but providers do not grow.
class NoFrontierError : public NumericError {
public:
  using NumericError::NumericError;
};

class SingularSlopeError : public NumericError {
public:
  using NumericError::NumericError;
};

}  // namespace mcmarket
