#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace blpp {

// Signed magnitude in log space: value = sign * exp(log_mag). Keeps
// determinant entries and products of many Gaussian factors representable
// far beyond double range. sign is -1, 0 or +1; a zero has log_mag = -inf.
struct LogReal {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();

  static LogReal zero() { return LogReal{}; }
  static LogReal one() { return LogReal{1, 0.0}; }

  static LogReal from_value(double v) {
    if (v == 0.0) return zero();
    if (std::isnan(v)) throw std::invalid_argument("LogReal: NaN input");
    return LogReal{v > 0.0 ? 1 : -1, std::log(std::abs(v))};
  }

  static LogReal from_log(int sign, double log_mag) {
    if (sign == 0) return zero();
    if (sign != 1 && sign != -1) throw std::invalid_argument("LogReal: sign must be -1, 0, or 1");
    return LogReal{sign, log_mag};
  }

  bool is_zero() const { return sign == 0; }

  // May overflow/underflow to +-inf / 0 by design.
  double value() const {
    if (sign == 0) return 0.0;
    return static_cast<double>(sign) * std::exp(log_mag);
  }

  LogReal operator-() const { return LogReal{-sign, log_mag}; }

  friend LogReal operator*(const LogReal& a, const LogReal& b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return LogReal{a.sign * b.sign, a.log_mag + b.log_mag};
  }

  friend LogReal operator/(const LogReal& a, const LogReal& b) {
    if (b.sign == 0) throw std::domain_error("LogReal: division by zero");
    if (a.sign == 0) return zero();
    return LogReal{a.sign * b.sign, a.log_mag - b.log_mag};
  }

  // log-sum-exp with signs; exact cancellation yields zero().
  friend LogReal operator+(const LogReal& a, const LogReal& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogReal& big = (a.log_mag >= b.log_mag) ? a : b;
    const LogReal& small = (a.log_mag >= b.log_mag) ? b : a;
    const double d = small.log_mag - big.log_mag;  // <= 0
    const double inner = static_cast<double>(big.sign) +
                         static_cast<double>(small.sign) * std::exp(d);
    if (inner == 0.0) return zero();
    return LogReal{inner > 0.0 ? 1 : -1, big.log_mag + std::log(std::abs(inner))};
  }

  friend LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

  LogReal pow_int(long long e) const {
    if (e == 0) return one();
    if (sign == 0) {
      if (e < 0) throw std::domain_error("LogReal: 0 to a negative power");
      return zero();
    }
    const int s = (sign == -1 && (e % 2 != 0)) ? -1 : 1;
    return LogReal{s, log_mag * static_cast<double>(e)};
  }

  LogReal abs() const { return LogReal{sign == 0 ? 0 : 1, log_mag}; }
};

inline LogReal log_exp(double exponent) { return LogReal::from_log(1, exponent); }

}  // namespace blpp
