#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "blpp/errors.hpp"
#include "blpp/kernels.hpp"
#include "blpp/logdet.hpp"
#include "blpp/logreal.hpp"

namespace blpp {

// Prefix divided differences f[x_1], f[x_1,x_2], ..., f[x_1..x_n] over
// strictly increasing nodes via the triangular recursion
//   f[y_i..y_j] = (f[y_{i+1}..y_j] - f[y_i..y_{j-1}]) / (y_j - y_i).
// Coincident nodes need derivative information and are rejected here; the
// confluent case is handled inside gk_function.
template <typename F>
inline std::vector<double> divided_differences(const F& f, const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("divided_differences: empty node set");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(xs[i] < xs[i + 1]))
      throw std::invalid_argument("divided_differences: nodes must be strictly increasing");
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = f(xs[i]);
  std::vector<double> prefix(n);
  prefix[0] = col[0];
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t j = n - 1; j >= level; --j)
      col[j] = (col[j] - col[j - 1]) / (xs[j] - xs[j - level]);
    prefix[level] = col[level];
  }
  return prefix;
}

namespace detail {

inline double binomial(int a, int q) {
  double v = 1.0;
  for (int i = 1; i <= q; ++i) v *= static_cast<double>(a - q + i) / static_cast<double>(i);
  return v;
}

// Falling factorial k (k-1) ... (k-q+1).
inline double falling(int k, int q) {
  double v = 1.0;
  for (int i = 0; i < q; ++i) v *= static_cast<double>(k - i);
  return v;
}

// Prefix divided differences over non-decreasing nodes where exact ties are
// resolved through derivatives: a run of p equal nodes contributes the
// Taylor-block entry f[z,..,z] = f^{(p-1)}(z)/(p-1)!. deriv(a, x) must
// return f^{(a)}(x) with deriv(0, x) = f(x).
template <typename D>
inline std::vector<double> confluent_prefix_dd(const D& deriv, const std::vector<double>& ys) {
  const std::size_t n = ys.size();
  std::vector<std::vector<double>> t(n);
  std::vector<double> fact(n, 1.0);
  for (std::size_t j = 1; j < n; ++j) fact[j] = fact[j - 1] * static_cast<double>(j);
  for (std::size_t i = 0; i < n; ++i) {
    t[i].resize(i + 1);
    t[i][0] = deriv(0, ys[i]);
    for (std::size_t j = 1; j <= i; ++j) {
      if (ys[i] == ys[i - j])
        t[i][j] = deriv(static_cast<int>(j), ys[i]) / fact[j];
      else
        t[i][j] = (t[i][j - 1] - t[i - 1][j - 1]) / (ys[i] - ys[i - j]);
    }
  }
  std::vector<double> prefix(n);
  for (std::size_t j = 0; j < n; ++j) prefix[j] = t[j][j];
  return prefix;
}

inline void check_gk_args(double r, const std::vector<double>& b, const std::vector<int>& k,
                          const std::vector<double>& x) {
  if (!(r > 0.0)) throw std::invalid_argument("gk: need r > 0");
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("gk: empty state");
  if (n > kMaxDensityLines) throw UnsupportedSize("gk: too many lines");
  if (b.size() != n || k.size() != n) throw std::invalid_argument("gk: size mismatch");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (x[i] > x[i + 1]) throw std::invalid_argument("gk: state must be non-decreasing");
    if (b[i] < b[i + 1]) throw std::invalid_argument("gk: start must be non-increasing");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (k[i] < 0 || k[i] > static_cast<int>(n - 1 - i))
      throw std::invalid_argument("gk: index vector out of range");
}

}  // namespace detail

// Hermite-exponential determinant ratio
//   G^k(x) = |det_{i,j} H_{k_i}(x_j / sqrt(4r)) exp(x_j b_{n-i+1} / 2r)|
//            / prod_{i<j} (x_j - x_i)
// over non-decreasing x (1-based indices above). Computed as the equal
// divided-difference determinant |det_{i,j} f_i[x_1..x_j]| with
// f_i(y) = H_{k_i}(y / sqrt(4r)) exp(y b_{n-i+1} / 2r), which stays finite
// as nodes merge. Nodes closer than 1e-6 times the coordinate scale are
// snapped to their cluster mean and handled with analytic derivatives of
// f_i (Taylor blocks), so ties are exact rather than cancellation-prone.
inline LogReal gk_function(double r, const std::vector<double>& b, const std::vector<int>& k,
                           const std::vector<double>& x) {
  detail::check_gk_args(r, b, k, x);
  const std::size_t n = x.size();
  const double s = std::sqrt(4.0 * r);

  double scale = 1.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi));
  const double tie_gap = 1e-6 * scale;
  std::vector<double> ys(x);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && ys[hi + 1] - ys[hi] < tie_gap) ++hi;
    if (hi > lo) {
      double mean = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) mean += ys[j];
      mean /= static_cast<double>(hi - lo + 1);
      for (std::size_t j = lo; j <= hi; ++j) ys[j] = mean;
    }
    lo = hi + 1;
  }

  std::vector<std::vector<LogReal>> mat(n, std::vector<LogReal>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int ki = k[i];
    const double c = b[n - 1 - i] / (2.0 * r);
    // Factor the exponential's largest value over the nodes out of the row,
    // so the divided-difference table works on numbers of modest size.
    const double anchor = c >= 0.0 ? ys.back() : ys.front();
    const auto deriv = [&](int a, double y) {
      // d^a/dy^a [H_k(y/s) e^{cy}] by Leibniz, with
      // d^q/dy^q H_k(y/s) = 2^q k!/(k-q)! s^{-q} H_{k-q}(y/s).
      const std::vector<double> h = hermite_all(ki, y / s);
      double sum = 0.0;
      for (int q = 0; q <= std::min(a, ki); ++q)
        sum += detail::binomial(a, q) * std::ldexp(detail::falling(ki, q), q) *
               std::pow(s, -q) * h[ki - q] * std::pow(c, a - q);
      return sum * std::exp(c * (y - anchor));
    };
    const std::vector<double> row = detail::confluent_prefix_dd(deriv, ys);
    const LogReal row_factor = log_exp(c * anchor);
    for (std::size_t j = 0; j < n; ++j)
      mat[i][j] = LogReal::from_value(row[j]) * row_factor;
  }
  return log_det(mat).det.abs();
}

// Hadamard-type envelope for gk_function over any admissible index vector,
// with the explicit constants
//   2^{n^2} (n!)^n 2^{n(n+1)/2} (b_1/2r v 1)^{n^2}
//   exp(n (x_high)_+ b_1 / 2r) <((x_low)_- + (x_high)_+) / sqrt(4r)>^{n^2},
// where <u> = sqrt(u^2 + 1) and x_low, x_high bracket the evaluation nodes.
inline LogReal gk_hadamard_bound(double r, const std::vector<double>& b, int n, double x_low,
                                 double x_high) {
  if (!(r > 0.0)) throw std::invalid_argument("gk_hadamard_bound: need r > 0");
  if (n < 1 || static_cast<std::size_t>(n) > kMaxDensityLines)
    throw UnsupportedSize("gk_hadamard_bound: line count out of range");
  if (b.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("gk_hadamard_bound: size mismatch");
  const double dn = static_cast<double>(n);
  const double b1 = b.front();
  const double xp = std::max(x_high, 0.0);
  const double u = (std::max(-x_low, 0.0) + xp) / std::sqrt(4.0 * r);
  double lg = dn * dn * std::log(2.0) + dn * std::lgamma(dn + 1.0) +
              0.5 * dn * (dn + 1.0) * std::log(2.0) +
              dn * dn * std::log(std::max(b1 / (2.0 * r), 1.0)) + dn * xp * b1 / (2.0 * r) +
              0.5 * dn * dn * std::log1p(u * u);
  return log_exp(lg);
}

// Term-by-term upper envelope for the inhomogeneous transition density on
// the top row of the interlacing cone, from the Hermite translation
// expansion of det Phi^{(i-n)}(x_j - b_{n-i+1}):
//   nu(x) = prod_i e^{-b_i^2/4r} (4r)^{-n(n-1)/4} prod_j phi_r(x_j)
//           prod_{i<j}(x_j - x_i)
//           sum_k prod_i C(n-i, k_i) (2|b_{n-i+1}|/sqrt(4r))^{n-i-k_i} G^k(x).
// Dominates the determinant's absolute value by the triangle inequality and
// collapses to the entrance density when b = 0 (single surviving term).
inline LogReal nu_integrand(double r, const std::vector<double>& b,
                            const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n > 4) throw UnsupportedSize("nu_integrand: supported only up to four lines");
  std::vector<int> k(n, 0);
  detail::check_gk_args(r, b, k, x);
  const double s = std::sqrt(4.0 * r);

  double pre_log = -0.25 * static_cast<double>(n) * static_cast<double>(n - 1) *
                   std::log(4.0 * r);
  for (double bi : b) pre_log -= bi * bi / (4.0 * r);
  for (double xj : x) pre_log += log_phi_gauss(r, xj);
  LogReal vdm = LogReal::one();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) vdm = vdm * LogReal::from_value(x[j] - x[i]);

  LogReal sum = LogReal::zero();
  for (;;) {
    double coeff = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int room = static_cast<int>(n - 1 - i);
      coeff *= detail::binomial(room, k[i]) *
               std::pow(2.0 * std::abs(b[n - 1 - i]) / s, room - k[i]);
    }
    if (coeff != 0.0) sum = sum + LogReal::from_value(coeff) * gk_function(r, b, k, x);
    // Odometer over the admissible index box k_i in [0, n-1-i].
    std::size_t pos = 0;
    while (pos < n && k[pos] == static_cast<int>(n - 1 - pos)) k[pos++] = 0;
    if (pos == n) break;
    ++k[pos];
  }
  return log_exp(pre_log) * vdm * sum;
}

}  // namespace blpp
