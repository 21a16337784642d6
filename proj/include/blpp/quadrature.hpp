#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blpp/errors.hpp"

namespace blpp {

struct QuadNodes {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on the
// three-term recurrence from the usual cosine initial guesses.
inline QuadNodes gauss_legendre(std::size_t n) {
  if (n < 1 || n > 512) throw std::invalid_argument("gauss_legendre: order out of range");
  QuadNodes q;
  q.x.resize(n);
  q.w.resize(n);
  const std::size_t mhalf = (n + 1) / 2;
  for (std::size_t i = 0; i < mhalf; ++i) {
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = ((2.0 * jj + 1.0) * z * p2 - jj * p3) / (jj + 1.0);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    q.x[i] = -z;
    q.x[n - 1 - i] = z;
    q.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    q.w[n - 1 - i] = q.w[i];
  }
  return q;
}

// Gauss-Hermite nodes/weights for weight exp(-x^2), Newton iteration on the
// orthonormal recurrence.
inline QuadNodes gauss_hermite(std::size_t n) {
  if (n < 1 || n > 512) throw std::invalid_argument("gauss_hermite: order out of range");
  QuadNodes q;
  q.x.resize(n);
  q.w.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const std::size_t mhalf = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < mhalf; ++i) {
    // Stretch-and-refine initial guesses (Numerical-Recipes style ladder).
    const double dn = static_cast<double>(n);
    if (i == 0) {
      z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * q.x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * q.x[1];
    } else {
      z = 2.0 * z - q.x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j + 1);
        p1 = z * std::sqrt(2.0 / jj) * p2 - std::sqrt((jj - 1.0) / jj) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    q.x[i] = z;  // store the positive half descending, mirror below
    q.w[i] = 2.0 / (pp * pp);
  }
  // Mirror: nodes come out largest first; arrange full symmetric set.
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < mhalf; ++i) {
    x[i] = -q.x[i];
    w[i] = q.w[i];
    x[n - 1 - i] = q.x[i];
    w[n - 1 - i] = q.w[i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  q.x = std::move(x);
  q.w = std::move(w);
  return q;
}

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodX[i];
    const double fv = f(c - dx) + f(c + dx);
    resk += kKronrodW[i] * fv;
    if (i % 2 == 1) resg += kGaussW[i / 2] * fv;
  }
  const double f0 = f(c);
  resk += kKronrodW[7] * f0;
  resg += kGaussW[3] * f0;
  kronrod = resk * h;
  err = std::abs((resk - resg) * h);
}

}  // namespace detail

// Adaptive integration on [a, b] with an embedded Gauss/Kronrod error
// estimate and interval bisection. Deterministic: the refinement order is a
// fixed depth-first recursion, so repeated calls are bitwise identical.
template <typename F>
double integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-10,
                          double abs_floor = 1e-300, int max_depth = 48) {
  if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: need b >= a");
  double whole, err0;
  detail::gk15(f, a, b, whole, err0);

  std::function<double(double, double, double, double, int)> rec =
      [&](double lo, double hi, double est, double err, int depth) -> double {
    if (err <= rel_tol * std::abs(est) + abs_floor || depth >= max_depth) return est;
    const double mid = 0.5 * (lo + hi);
    double le, lerr, re, rerr;
    detail::gk15(f, lo, mid, le, lerr);
    detail::gk15(f, mid, hi, re, rerr);
    return rec(lo, mid, le, lerr, depth + 1) + rec(mid, hi, re, rerr, depth + 1);
  };
  return rec(a, b, whole, err0, 0);
}

}  // namespace blpp
