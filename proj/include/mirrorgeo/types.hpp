#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorgeo {

using Vec = std::vector<double>;

/// Raised for malformed inputs: bad exponents, mismatched dimensions, invalid specs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solver fails to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Raised when a checked bound or invariant fails on computed data.
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value returned by gauge computations for vectors outside the span of a ball.
inline constexpr double kUnboundedGauge = std::numeric_limits<double>::infinity();

inline bool is_unbounded(double gauge) { return std::isinf(gauge); }

/// A norm exponent in [1, inf]. Infinity is a distinct state, never a float sentinel.
class Exponent {
 public:
  /// Throws InvalidArgument for p < 1 or NaN. Passing +inf yields the infinite exponent.
  explicit Exponent(double p) {
    if (std::isnan(p) || p < 1.0) {
      throw InvalidArgument("exponent must lie in [1, inf], got " + std::to_string(p));
    }
    infinite_ = std::isinf(p);
    value_ = infinite_ ? 0.0 : p;
  }

  static Exponent infinity() {
    Exponent e(1.0);
    e.infinite_ = true;
    e.value_ = 0.0;
    return e;
  }

  bool is_infinite() const { return infinite_; }

  /// Finite value; throws for the infinite exponent.
  double value() const {
    if (infinite_) throw InvalidArgument("infinite exponent has no finite value");
    return value_;
  }

  /// 1/p, with 1/inf = 0.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }

  bool operator==(const Exponent& o) const {
    return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
  }

  std::string to_string() const;

 private:
  double value_ = 1.0;
  bool infinite_ = false;
};

/// q with 1/p + 1/q = 1.
Exponent holder_conjugate(Exponent p);

/// Parses "inf", "infinity" or a decimal number.
Exponent parse_exponent(const std::string& text);

}  // namespace mirrorgeo
