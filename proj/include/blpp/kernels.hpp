#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "blpp/errors.hpp"
#include "blpp/logreal.hpp"

namespace blpp {

inline constexpr int kMaxHermiteOrder = 64;
inline constexpr int kMaxIterOrder = 40;

// Physicists' Hermite polynomials H_0..H_n at x, by the three-term
// recurrence H_{j+1} = 2 x H_j - 2 j H_{j-1}.
inline std::vector<double> hermite_all(int n, double x) {
  if (n < 0 || n > kMaxHermiteOrder)
    throw UnsupportedSize("hermite_all: order out of range");
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = 2.0 * x;
  for (int j = 1; j < n; ++j)
    h[j + 1] = 2.0 * x * h[j] - 2.0 * static_cast<double>(j) * h[j - 1];
  return h;
}

inline double hermite(int n, double x) { return hermite_all(n, x).back(); }

// Centred Gaussian density with variance 2t (diffusion at rate two run for
// time t): phi_t(y) = exp(-y^2/(4t)) / sqrt(4 pi t).
inline double phi_gauss(double t, double y) {
  if (!(t > 0.0)) throw std::invalid_argument("phi_gauss: need t > 0");
  return std::exp(-y * y / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
}

inline double log_phi_gauss(double t, double y) {
  if (!(t > 0.0)) throw std::invalid_argument("log_phi_gauss: need t > 0");
  return -y * y / (4.0 * t) - 0.5 * std::log(4.0 * M_PI * t);
}

namespace detail {

// log(erfc(z)) without underflow for large positive z.
inline double log_erfc(double z) {
  if (z < 25.0) return std::log(std::erfc(z));
  const double z2 = z * z;
  // erfc(z) = exp(-z^2)/(z sqrt(pi)) * (1 - 1/(2z^2) + 3/(4z^4) - ...)
  const double series = 1.0 - 0.5 / z2 + 0.75 / (z2 * z2);
  return -z2 - std::log(z * std::sqrt(M_PI)) + std::log(series);
}

// Forward ladder: returns Phi^{(0..m)}_t(y) as plain doubles. For y >= 0
// every recurrence term is non-negative and the ladder is exact to roundoff;
// for mildly negative y the cancellation loss is bounded by roughly
// (y^2/2t)^{m-1}/(m-1)!, still negligible at |y| <= 1.5 sqrt(t).
inline std::vector<double> phi_iter_forward(int m, double t, double y) {
  std::vector<double> v(static_cast<std::size_t>(m) + 1);
  v[0] = phi_gauss(t, y);
  if (m >= 1) v[1] = 0.5 * std::erfc(-y / (2.0 * std::sqrt(t)));
  for (int j = 2; j <= m; ++j)
    v[j] = (y * v[j - 1] + 2.0 * t * v[j - 2]) / static_cast<double>(j - 1);
  return v;
}

// Backward (minimal-solution) ladder for y well below 0, where the forward
// recurrence cancels catastrophically. Runs the recurrence downward from a
// buffer of extra orders and normalises at order zero; returns the ratio
// Phi^{(m)}_t(y) / phi_t(y), which is well scaled for all y < 0.
//
// The two solutions of the recurrence separate like
// exp(+-|y| sqrt(2 j / t)), so the buffer is sized so the unwanted branch is
// damped by e^{-35} before order m is reached; the buffer shrinks as |y|
// grows and the separation per step strengthens.
inline double phi_iter_ratio_backward(int m, double t, double y) {
  const double u = std::abs(y) / std::sqrt(t);
  const double s = 24.75 / u;  // required growth of sqrt(order)
  const int buffer =
      static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(m)) * s + s * s)) + 16;
  const int start = m + buffer;
  double hi = 0.0;  // trial value at order `start`
  double lo = 1e-12;  // trial value at order `start - 1`
  double saved = 0.0;
  bool have_saved = false;
  for (int j = start; j >= 2; --j) {
    // Phi^{(j-2)} = ((j-1) Phi^{(j)} - y Phi^{(j-1)}) / (2t); both terms
    // positive since y < 0.
    const double next = (static_cast<double>(j - 1) * hi - y * lo) / (2.0 * t);
    hi = lo;
    lo = next;
    if (j - 1 == m) {
      saved = hi;
      have_saved = true;
    }
    if (std::abs(lo) > 1e250) {
      hi *= 1e-250;
      lo *= 1e-250;
      if (have_saved) saved *= 1e-250;
    }
  }
  return saved / lo;
}

}  // namespace detail

// Iterated Gaussian kernel ladder. For m >= 1 this is the m-fold repeated
// integral of phi_t from -infinity,
//   Phi^{(m)}_t(y) = int_{-inf}^y (y - x)^{m-1}/(m-1)! phi_t(x) dx,
// for m = 0 the density itself, and for m < 0 the |m|-th derivative, which
// has the closed form (-1)^{|m|} (4t)^{-|m|/2} H_{|m|}(y / sqrt(4t)) phi_t(y).
// Differentiating in y steps the ladder down by one order.
//
// Returned in log space; see phi_iter for the plain-double wrapper.
inline LogReal phi_iter_log(int m, double t, double y) {
  if (!(t > 0.0)) throw std::invalid_argument("phi_iter_log: need t > 0");
  if (m < -kMaxIterOrder || m > kMaxIterOrder)
    throw UnsupportedSize("phi_iter_log: order out of range");
  const double logphi = log_phi_gauss(t, y);
  if (m == 0) return LogReal::from_log(1, logphi);
  if (m < 0) {
    const int k = -m;
    const double h = hermite(k, y / std::sqrt(4.0 * t));
    if (h == 0.0) return LogReal::zero();
    const int sign = ((k % 2 == 0) ? 1 : -1) * (h > 0.0 ? 1 : -1);
    const double log_mag =
        -0.5 * static_cast<double>(k) * std::log(4.0 * t) + std::log(std::abs(h)) + logphi;
    return LogReal::from_log(sign, log_mag);
  }
  if (m == 1)
    return LogReal::from_log(1, std::log(0.5) + detail::log_erfc(-y / (2.0 * std::sqrt(t))));
  // The forward ladder is stable down to mildly negative y; below that the
  // backward ladder takes over (its branch separation needs |y| bounded away
  // from zero, which the crossover guarantees).
  if (y >= -1.5 * std::sqrt(t)) {
    const double v = detail::phi_iter_forward(m, t, y)[static_cast<std::size_t>(m)];
    return LogReal::from_value(v);
  }
  const double ratio = detail::phi_iter_ratio_backward(m, t, y);
  return LogReal::from_log(1, std::log(ratio) + logphi);
}

inline double phi_iter(int m, double t, double y) { return phi_iter_log(m, t, y).value(); }

// Exponential-quotient kernel F^k_r(y) = Phi^{(k)}_r(y) / phi_r(y). For
// k >= 1 it equals int_0^inf z^{k-1}/(k-1)! exp(-z^2/4r) exp(yz/2r) dz; for
// k <= 0 it collapses to the Hermite closed form
//   F^k_r(y) = (-1)^k (4r)^{k/2} H_{-k}(y / sqrt(4r)).
// Kept in log space: the ratio grows like exp(y^2/4r) for y -> +inf.
inline LogReal f_kernel(int k, double r, double y) {
  if (!(r > 0.0)) throw std::invalid_argument("f_kernel: need r > 0");
  if (k < -kMaxIterOrder || k > kMaxIterOrder)
    throw UnsupportedSize("f_kernel: order out of range");
  if (k <= 0) {
    const int kk = -k;
    const double h = hermite(kk, y / std::sqrt(4.0 * r));
    if (h == 0.0) return LogReal::zero();
    const int sign = ((kk % 2 == 0) ? 1 : -1) * (h > 0.0 ? 1 : -1);
    return LogReal::from_log(
        sign, -0.5 * static_cast<double>(kk) * std::log(4.0 * r) + std::log(std::abs(h)));
  }
  return phi_iter_log(k, r, y) / LogReal::from_log(1, log_phi_gauss(r, y));
}

}  // namespace blpp
