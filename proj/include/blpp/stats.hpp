#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace blpp {

// One-sample goodness-of-fit summary. The p-value always comes from the
// asymptotic Kolmogorov law, so it is only meaningful for sample counts
// where that approximation holds; ks_test enforces a floor.
struct KSReport {
  double statistic = 0.0;
  std::size_t sample_count = 0;
  double p_value = 0.0;
};

// Tail of the Kolmogorov distribution, Q(lambda) = P(sup |B(F)| > lambda).
// The alternating series converges fast for large lambda; for small lambda
// the theta-dual form is used instead.
inline double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    const double x = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
    const double sum = x + std::pow(x, 9.0) + std::pow(x, 25.0) + std::pow(x, 49.0);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Supremum distance between the empirical CDF of the samples and a model
// CDF. Defined for any non-empty sample; no p-value is attached here.
inline double ks_statistic(const std::vector<double>& samples,
                           const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: need at least one sample");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    if (!(f >= 0.0 && f <= 1.0))
      throw std::invalid_argument("ks_statistic: cdf must map into [0,1]");
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

inline KSReport ks_test(const std::vector<double>& samples,
                        const std::function<double(double)>& cdf) {
  if (samples.size() < 10)
    throw std::invalid_argument("ks_test: need at least 10 samples for the asymptotic law");
  KSReport rep;
  rep.statistic = ks_statistic(samples, cdf);
  rep.sample_count = samples.size();
  rep.p_value =
      kolmogorov_q(std::sqrt(static_cast<double>(samples.size())) * rep.statistic);
  return rep;
}

// Two-sample KS with the effective sample count n1 n2 / (n1 + n2) feeding
// the same asymptotic tail. sample_count reports the effective count
// rounded down.
inline KSReport ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 10 || b.size() < 10)
    throw std::invalid_argument("ks_two_sample: need at least 10 samples on each side");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  KSReport rep;
  rep.statistic = d;
  rep.sample_count = static_cast<std::size_t>(n_eff);
  rep.p_value = kolmogorov_q(std::sqrt(n_eff) * d);
  return rep;
}

// Upper-tail p-value of a chi-square statistic.
inline double chi_square_p(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_p: need dof >= 1");
  if (!(statistic >= 0.0)) throw std::invalid_argument("chi_square_p: need statistic >= 0");
  return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

}  // namespace blpp
