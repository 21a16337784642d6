#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "blpp/errors.hpp"
#include "blpp/logreal.hpp"

namespace blpp {

inline constexpr std::size_t kMaxDetOrder = 16;

// Conditioning threshold beyond which determinant-based ratios are refused.
inline constexpr double kConditionLimit = 1e12;

struct DetResult {
  LogReal det;
  // max/min pivot magnitude ratio of the scaled factorization; >= 1.
  double condition_hint = 1.0;
};

// Determinant of a small matrix given in log space. Each row's dominant
// log magnitude is factored out first, so the remaining matrix has entries
// in [-1, 1] and an ordinary partially pivoted elimination in doubles is
// safe; the factored scales are added back in log space.
inline DetResult log_det(std::vector<std::vector<LogReal>> a) {
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("log_det: empty matrix");
  if (n > kMaxDetOrder) throw UnsupportedSize("log_det: order above supported limit");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("log_det: matrix not square");

  double log_scale = 0.0;
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (!a[i][j].is_zero()) row_max = std::max(row_max, a[i][j].log_mag);
    if (std::isinf(row_max)) return DetResult{LogReal::zero(), 1.0};  // zero row
    log_scale += row_max;
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = a[i][j].is_zero()
                    ? 0.0
                    : static_cast<double>(a[i][j].sign) * std::exp(a[i][j].log_mag - row_max);
  }

  int sign = 1;
  double log_prod = 0.0;
  double piv_max = 0.0, piv_min = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (m[p][c] == 0.0) return DetResult{LogReal::zero(), kConditionLimit};
    if (p != c) {
      std::swap(m[p], m[c]);
      sign = -sign;
    }
    const double piv = m[c][c];
    piv_max = std::max(piv_max, std::abs(piv));
    piv_min = std::min(piv_min, std::abs(piv));
    if (piv < 0.0) sign = -sign;
    log_prod += std::log(std::abs(piv));
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / piv;
      if (f == 0.0) continue;
      for (std::size_t j = c + 1; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  DetResult res;
  res.det = LogReal::from_log(sign, log_scale + log_prod);
  res.condition_hint = (piv_min > 0.0) ? std::max(1.0, piv_max / piv_min)
                                       : kConditionLimit;
  return res;
}

}  // namespace blpp
