#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "blpp/errors.hpp"
#include "blpp/kernels.hpp"
#include "blpp/logdet.hpp"
#include "blpp/logreal.hpp"

namespace blpp {

inline constexpr std::size_t kMaxDensityLines = 12;

struct DensityEval {
  LogReal value;
  // Pivot-ratio conditioning of the underlying determinant(s); >= 1.
  double condition_hint = 1.0;
};

namespace detail {

// Shared argument validation for the determinantal formulas. Coordinates
// are ordered top line first, so vectors must be non-increasing.
inline void check_density_args(double r, const std::vector<double>& x,
                               const std::vector<double>& b) {
  if (!(r > 0.0)) throw std::invalid_argument("density: need r > 0");
  const std::size_t m = x.size();
  if (m == 0) throw std::invalid_argument("density: empty state");
  if (m > kMaxDensityLines) throw UnsupportedSize("density: too many lines");
  if (b.size() != m) throw std::invalid_argument("density: state/start size mismatch");
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (x[i] < x[i + 1]) throw std::invalid_argument("density: state must be non-increasing");
    if (b[i] < b[i + 1]) throw std::invalid_argument("density: start must be non-increasing");
  }
}

}  // namespace detail

// Transition density of the m-line reflected system started from
// non-increasing initial data b, evaluated at time r in the non-increasing
// state x:
//   q_r(x; b) = det_{i,j} Phi^{(i-j)}_r(x_{m-j+1} - b_{m-i+1})   (1-based).
// The density lives on the closed Weyl chamber x_1 >= ... >= x_m and
// integrates to one there.
inline DensityEval warren_density(double r, const std::vector<double>& x,
                                  const std::vector<double>& b) {
  detail::check_density_args(r, x, b);
  const std::size_t m = x.size();
  std::vector<std::vector<LogReal>> mat(m, std::vector<LogReal>(m));
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int order = static_cast<int>(i) - static_cast<int>(j);
      const double arg = x[m - j] - b[m - i];
      mat[i - 1][j - 1] = phi_iter_log(order, r, arg);
    }
  const DetResult det = log_det(mat);
  return DensityEval{det.det, det.condition_hint};
}

// Same determinant evaluated with rows and columns exchanged:
//   det_{i,j} Phi^{(j-i)}_r(x_{m-i+1} - b_{m-j+1}).
// Algebraically identical to warren_density (a determinant equals that of
// its transpose); exposed so the invariance can be checked numerically.
inline DensityEval warren_density_transposed(double r, const std::vector<double>& x,
                                             const std::vector<double>& b) {
  detail::check_density_args(r, x, b);
  const std::size_t m = x.size();
  std::vector<std::vector<LogReal>> mat(m, std::vector<LogReal>(m));
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int order = static_cast<int>(j) - static_cast<int>(i);
      const double arg = x[m - i] - b[m - j];
      mat[i - 1][j - 1] = phi_iter_log(order, r, arg);
    }
  const DetResult det = log_det(mat);
  return DensityEval{det.det, det.condition_hint};
}

struct RnRatioEval {
  LogReal value;
  double condition_hint = 1.0;
  // Relative disagreement between the two evaluation routes.
  double cross_residual = 0.0;
};

namespace detail {

// Quotient route: both determinants built from the iterated kernel.
inline RnRatioEval rn_ratio_phi_route(double r, const std::vector<double>& x,
                                      const std::vector<double>& b) {
  const std::vector<double> zeros(x.size(), 0.0);
  const DensityEval num = warren_density(r, x, b);
  const DensityEval den = warren_density(r, x, zeros);
  if (den.value.is_zero()) throw NumericalDegeneracy("rn_ratio: zero reference density",
                                                     kConditionLimit);
  RnRatioEval out;
  out.value = num.value / den.value;
  out.condition_hint = std::max(num.condition_hint, den.condition_hint);
  return out;
}

// Factored route: each entry is written as
//   Phi^{(k)}_r(x - b) = phi_r(x) exp(x b / 2r) exp(-b^2 / 4r) F^k_r(x - b),
// so the row factors exp(-b^2/4r) come out in front and the phi_r(x) column
// factors cancel between numerator and denominator, leaving determinants of
// the well-scaled quotient kernel.
inline RnRatioEval rn_ratio_f_route(double r, const std::vector<double>& x,
                                    const std::vector<double>& b) {
  const std::size_t m = x.size();
  LogReal prefactor = LogReal::one();
  for (std::size_t i = 0; i < m; ++i)
    prefactor = prefactor * log_exp(-b[i] * b[i] / (4.0 * r));

  std::vector<std::vector<LogReal>> num(m, std::vector<LogReal>(m));
  std::vector<std::vector<LogReal>> den(m, std::vector<LogReal>(m));
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int order = static_cast<int>(i) - static_cast<int>(j);
      const double xx = x[m - j];
      const double bb = b[m - i];
      num[i - 1][j - 1] =
          log_exp(xx * bb / (2.0 * r)) * f_kernel(order, r, xx - bb);
      den[i - 1][j - 1] = f_kernel(order, r, xx);
    }
  const DetResult dnum = log_det(num);
  const DetResult dden = log_det(den);
  if (dden.det.is_zero()) throw NumericalDegeneracy("rn_ratio: zero reference determinant",
                                                    kConditionLimit);
  RnRatioEval out;
  out.value = prefactor * (dnum.det / dden.det);
  out.condition_hint = std::max(dnum.condition_hint, dden.condition_hint);
  return out;
}

}  // namespace detail

// Radon-Nikodym ratio q_r(x; b) / q_r(x; 0), evaluated by two independent
// routes that must agree to 1e-8 in relative terms. Throws
// NumericalDegeneracy when either determinant is too ill conditioned to
// certify the cross-check.
inline RnRatioEval rn_ratio(double r, const std::vector<double>& x,
                            const std::vector<double>& b) {
  detail::check_density_args(r, x, b);
  const RnRatioEval phi_route = detail::rn_ratio_phi_route(r, x, b);
  const RnRatioEval f_route = detail::rn_ratio_f_route(r, x, b);
  const double cond = std::max(phi_route.condition_hint, f_route.condition_hint);
  if (cond >= kConditionLimit)
    throw NumericalDegeneracy("rn_ratio: determinant too ill conditioned", cond);

  // Relative disagreement in value space, computed from logs to stay
  // meaningful for extreme magnitudes.
  double residual;
  if (phi_route.value.is_zero() && f_route.value.is_zero()) {
    residual = 0.0;
  } else if (phi_route.value.is_zero() || f_route.value.is_zero() ||
             phi_route.value.sign != f_route.value.sign) {
    residual = 1.0;
  } else {
    const double dlog = phi_route.value.log_mag - f_route.value.log_mag;
    residual = std::abs(std::expm1(dlog));
  }
  if (residual > 1e-8)
    throw NumericalDegeneracy("rn_ratio: evaluation routes disagree", cond);

  RnRatioEval out = phi_route;
  out.condition_hint = cond;
  out.cross_residual = residual;
  return out;
}

// Entrance law of the n-line system released from the origin, evaluated at
// time t > 0 in the non-decreasing coordinates x_1 <= ... <= x_n:
//   mu^n_t(x) = (2 pi)^{-n/2} (2t)^{-n^2/2} exp(-sum x_i^2 / 4t)
//               prod_{i<j} (x_j - x_i).
// Note the coordinate order is the reverse of warren_density's.
inline DensityEval gt_entrance_density(int n, double t, const std::vector<double>& x) {
  if (!(t > 0.0)) throw std::invalid_argument("gt_entrance_density: need t > 0");
  if (n < 1 || static_cast<std::size_t>(n) > kMaxDensityLines)
    throw UnsupportedSize("gt_entrance_density: line count out of range");
  if (x.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("gt_entrance_density: size mismatch");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i] > x[i + 1])
      throw std::invalid_argument("gt_entrance_density: state must be non-decreasing");

  const double dn = static_cast<double>(n);
  double log_mag = -0.5 * dn * std::log(2.0 * M_PI) - 0.5 * dn * dn * std::log(2.0 * t);
  for (double xi : x) log_mag -= xi * xi / (4.0 * t);
  LogReal vandermonde = LogReal::one();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      vandermonde = vandermonde * LogReal::from_value(x[j] - x[i]);
  return DensityEval{LogReal::from_log(1, log_mag) * vandermonde, 1.0};
}

}  // namespace blpp
