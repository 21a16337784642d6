#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blpp/core.hpp"
#include "blpp/densities.hpp"
#include "blpp/errors.hpp"
#include "blpp/kernels.hpp"
#include "blpp/logdet.hpp"
#include "blpp/quadrature.hpp"
#include "blpp/reflect.hpp"
#include "blpp/rng.hpp"
#include "blpp/stats.hpp"

// Statistical verification harness. Simulated reflected ensembles are
// compared against the exact transition density: a KS test on the top-line
// marginal, a chi-square test on the ordered pair (m = 2), a semigroup
// residual, the diagonal-marginal identity, and grid-refinement series that
// separate discretization bias from statistical noise.

namespace blpp {

struct RefinementSeries {
  std::vector<std::size_t> grid_sizes;
  std::vector<double> statistics;
};

namespace detail {

// Distribution function of the top line at time r started from b (top
// first, non-increasing). The chamber integral of the transition determinant
// collapses column by column: integrating out the lowest remaining variable
// raises the order of one column by one and moves its argument up to the
// next variable, and after all m integrations every entry sits at h:
//   P(H_1(r) <= h) = det[ Phi^{(i-j+1)}(h - b_{m+1-i}) ].
// Verified against brute-force nested quadrature of the density (m <= 3,
// agreement ~1e-15) and against the exact normalization for m <= 6.
inline double top_line_cdf(double r, const std::vector<double>& b, double h) {
  const std::size_t m = b.size();
  std::vector<std::vector<LogReal>> a(m, std::vector<LogReal>(m));
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      a[i - 1][j - 1] = phi_iter_log(static_cast<int>(i) - static_cast<int>(j) + 1, r,
                                     h - b[m - i]);
  // Far tails cancel catastrophically in relative terms while the true value
  // sits at 0 or 1; clamping is the honest rounding of that limit.
  return std::clamp(log_det(std::move(a)).det.value(), 0.0, 1.0);
}

// m = 2 only: density in the top coordinate, cumulative in the bottom one.
// Integrating the bottom variable of the 2x2 determinant up to x2 raises the
// first column's order by one. At x2 = x1 this reduces to the top-line
// marginal density, so the conditional distribution of the bottom given the
// top is the ratio of two evaluations of this one kernel.
inline double pair_partial_cdf(double r, const std::vector<double>& b, double x1,
                               double x2) {
  std::vector<std::vector<LogReal>> a(2, std::vector<LogReal>(2));
  for (int i = 1; i <= 2; ++i) {
    a[i - 1][0] = phi_iter_log(i, r, x2 - b[2 - i]);
    a[i - 1][1] = phi_iter_log(i - 2, r, x1 - b[2 - i]);
  }
  return std::max(log_det(std::move(a)).det.value(), 0.0);
}

// Terminal top-line values of the reflected system driven by stride
// subsampled copies of one driving ensemble per replicate. Sharing the
// driving noise across levels makes the refinement series a common random
// number comparison: a finer grid only enlarges the feasible contact set, so
// per replicate the terminal top is non-decreasing in the grid size.
struct StrideTerminals {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> tops;  // tops[level][replicate]
  std::vector<double> final_bottoms;      // finest level, m = 2 only
};

inline StrideTerminals sample_stride_terminals(std::size_t m, const InitialData& b,
                                               std::size_t n_samples,
                                               const TimeGrid& grid,
                                               const std::vector<std::size_t>& sizes,
                                               RngStream& rng) {
  for (std::size_t s : sizes)
    if (s == 0 || grid.n_steps % s != 0)
      throw std::invalid_argument("sample_stride_terminals: sizes must divide the grid");
  StrideTerminals out;
  out.sizes = sizes;
  out.tops.assign(sizes.size(), {});
  for (auto& level : out.tops) level.reserve(n_samples);
  if (m == 2) out.final_bottoms.reserve(n_samples);

  for (std::size_t rep = 0; rep < n_samples; ++rep) {
    const Ensemble driving = sample_ensemble(grid, m, kRateTwo, {}, rng);
    for (std::size_t level = 0; level < sizes.size(); ++level) {
      const std::size_t steps = sizes[level];
      const std::size_t stride = grid.n_steps / steps;
      Ensemble sub;
      sub.grid = make_grid(grid.t0, grid.t1, steps);
      sub.lines.assign(m, std::vector<double>(steps + 1));
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j <= steps; ++j)
          sub.lines[k][j] = driving.lines[k][j * stride];
      const Ensemble tasep = brownian_tasep(sub, b);
      out.tops[level].push_back(tasep.lines[0].back());
      if (m == 2 && level + 1 == sizes.size())
        out.final_bottoms.push_back(tasep.lines[1].back());
    }
  }
  return out;
}

}  // namespace detail

struct VerifyDensityReport {
  KSReport top_marginal;  // finest grid level vs the exact top-line CDF
  std::optional<double> chi_square_statistic;  // m = 2 only
  std::optional<double> chi_square_p;
  RefinementSeries refinement;  // KS statistic per subsampling level
};

// Simulates n_samples replicates of the m-line reflected system on `grid`
// (which must span [0, r]) and tests the terminal law against the exact
// density. The chi-square test maps each (top, bottom) pair through the
// conditional-quantile transform, so its 20x20 cells have exactly equal mass
// under the exact law; it runs when m = 2 and the expected count per cell is
// at least 20.
inline VerifyDensityReport verify_density(std::size_t m, double r, const InitialData& b,
                                          std::size_t n_samples, const TimeGrid& grid,
                                          RngStream& rng) {
  b.validate();
  if (m == 0 || b.size() != m)
    throw std::invalid_argument("verify_density: initial data must have one entry per line");
  if (m > kMaxDetOrder)
    throw UnsupportedSize("verify_density: no exact density oracle at this order");
  if (!(r > 0.0)) throw std::invalid_argument("verify_density: need r > 0");
  if (grid.t0 != 0.0 || std::abs(grid.t1 - r) > 1e-12 * std::max(1.0, r))
    throw std::invalid_argument("verify_density: grid must span [0, r]");
  if (n_samples < 10) throw std::invalid_argument("verify_density: need >= 10 samples");

  std::vector<std::size_t> sizes;
  for (std::size_t stride : {16, 8, 4, 2, 1}) {
    const std::size_t steps = grid.n_steps / stride;
    if (grid.n_steps % stride == 0 && steps >= 16) sizes.push_back(steps);
  }
  if (sizes.empty() || sizes.back() != grid.n_steps) sizes.push_back(grid.n_steps);

  const detail::StrideTerminals terminals =
      detail::sample_stride_terminals(m, b, n_samples, grid, sizes, rng);
  const auto cdf = [&](double h) { return detail::top_line_cdf(r, b.values, h); };

  VerifyDensityReport report;
  report.top_marginal = ks_test(terminals.tops.back(), cdf);
  report.refinement.grid_sizes = terminals.sizes;
  for (const auto& level : terminals.tops)
    report.refinement.statistics.push_back(ks_statistic(level, cdf));

  if (m == 2 && n_samples >= 20 * 400) {
    std::vector<std::size_t> counts(400, 0);
    const auto& tops = terminals.tops.back();
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double x1 = tops[i];
      const double x2 = terminals.final_bottoms[i];
      const double u = cdf(x1);
      const double den = detail::pair_partial_cdf(r, b.values, x1, x1);
      const double num = detail::pair_partial_cdf(r, b.values, x1, x2);
      const double v = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
      const auto cu = std::min<std::size_t>(19, static_cast<std::size_t>(20.0 * u));
      const auto cv = std::min<std::size_t>(19, static_cast<std::size_t>(20.0 * v));
      ++counts[20 * cu + cv];
    }
    const double expected = static_cast<double>(n_samples) / 400.0;
    double stat = 0.0;
    for (std::size_t c : counts) {
      const double d = static_cast<double>(c) - expected;
      stat += d * d / expected;
    }
    report.chi_square_statistic = stat;
    report.chi_square_p = chi_square_p(stat, 399);
  }
  return report;
}

// Max relative semigroup defect max_x |q_{s+t}(x;b) - (q_t * q_s)(x;b)| /
// q_{s+t}(x;b) over a fixed grid of ordered test points, the convolution done
// by nested adaptive quadrature over the ordered region.
inline double chapman_kolmogorov_residual(std::size_t m, double s, double t,
                                          const InitialData& b) {
  b.validate();
  if (m == 0 || b.size() != m)
    throw std::invalid_argument(
        "chapman_kolmogorov_residual: initial data must have one entry per line");
  if (!(s > 0.0) || !(t > 0.0))
    throw std::invalid_argument("chapman_kolmogorov_residual: need s, t > 0");
  if (m > 2)
    throw UnsupportedSize("chapman_kolmogorov_residual: nested oracle rated for m <= 2");

  const double scale = std::sqrt(2.0 * (s + t));
  const double pad = 10.0 * std::sqrt(2.0 * std::max(s, t)) + 2.0;
  double worst = 0.0;

  if (m == 1) {
    const double b1 = b.values[0];
    for (double a : {-2.5, -1.0, 0.0, 1.0, 2.5}) {
      const double x = b1 + a * scale;
      const double direct = warren_density(s + t, {x}, b.values).value.value();
      const double lo = std::min(x, b1) - pad;
      const double hi = std::max(x, b1) + pad;
      const double conv = integrate_adaptive(
          [&](double y) {
            return warren_density(t, {x}, {y}).value.value() *
                   warren_density(s, {y}, b.values).value.value();
          },
          lo, hi, 1e-10);
      worst = std::max(worst, std::abs(direct - conv) / direct);
    }
    return worst;
  }

  const double b1 = b.values[0];
  const double b2 = b.values[1];
  constexpr double kOffsets[][2] = {
      {0.8, -0.8}, {1.6, 0.2}, {0.2, -0.3}, {2.4, -1.5}};
  for (const auto& a : kOffsets) {
    const std::vector<double> x = {b1 + a[0] * scale, b2 + a[1] * scale};
    const double direct = warren_density(s + t, x, b.values).value.value();
    const double lo = std::min(x[1], b2) - pad;
    const double hi = std::max(x[0], b1) + pad;
    const double conv = integrate_adaptive(
        [&](double y1) {
          return integrate_adaptive(
              [&](double y2) {
                return warren_density(t, x, {y1, y2}).value.value() *
                       warren_density(s, {y1, y2}, b.values).value.value();
              },
              lo, y1, 1e-8);
        },
        lo, hi, 1e-7);
    worst = std::max(worst, std::abs(direct - conv) / direct);
  }
  return worst;
}

// Exact identity between the two-line transition density from the origin and
// the cone marginal of the two-line entrance law: with u <= v,
//   q_r(v, u; 0, 0) = integral_{y <= u} mu^2_r(y, v) dy.
// Returns the max relative gap over a grid of (u, v) pairs including the
// degenerate diagonal v = u.
inline double diagonal_marginal_residual(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("diagonal_marginal_residual: need r > 0");
  const double scale = std::sqrt(2.0 * r);
  double worst = 0.0;
  for (double a : {-1.2, -0.4, 0.0, 0.6, 1.4}) {
    for (double gap : {0.0, 0.4, 1.1, 2.2}) {
      const double u = a * scale;
      const double v = u + gap * scale;
      const double lhs = warren_density(r, {v, u}, {0.0, 0.0}).value.value();
      const double lo = -(10.0 * scale + std::abs(u) + 1.0);
      const double rhs = integrate_adaptive(
          [&](double y) { return gt_entrance_density(2, r, {y, v}).value.value(); }, lo,
          u, 1e-10);
      worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    }
  }
  return worst;
}

inline constexpr std::uint64_t kRefinementStudySeed = 424242;

// Recomputes a named statistic across dyadic grid sizes with common driving
// noise, so the series isolates discretization bias. Recognized statistics:
//   "alpha-terminal-m2": mean terminal compensator of the two-line reflection
//     started at (0,0) over [0,1]; refining the grid only enlarges the
//     feasible contact set, so the series rises toward the continuum value.
//   "density-ks-m2": KS distance of the simulated top line against the exact
//     CDF (r = 1, b = (1,0), 2000 replicates); bias shrinks with the grid.
//   "constant": flat series, for calibrating the plumbing.
inline RefinementSeries refinement_study(const std::string& statistic,
                                         const std::vector<std::size_t>& grid_sizes) {
  if (grid_sizes.size() < 3)
    throw std::invalid_argument("refinement_study: need at least 3 grid sizes");
  for (std::size_t i = 0; i < grid_sizes.size(); ++i) {
    const std::size_t g = grid_sizes[i];
    if (g == 0 || (g & (g - 1)) != 0)
      throw std::invalid_argument("refinement_study: grid sizes must be powers of two");
    if (i > 0 && grid_sizes[i] <= grid_sizes[i - 1])
      throw std::invalid_argument("refinement_study: grid sizes must be increasing");
  }

  RefinementSeries out;
  out.grid_sizes = grid_sizes;

  if (statistic == "constant") {
    out.statistics.assign(grid_sizes.size(), 42.0);
    return out;
  }

  if (statistic == "alpha-terminal-m2") {
    constexpr std::size_t kReplicates = 256;
    const std::size_t finest = grid_sizes.back();
    const TimeGrid grid = make_grid(0.0, 1.0, finest);
    std::vector<double> acc(grid_sizes.size(), 0.0);
    for (std::size_t rep = 0; rep < kReplicates; ++rep) {
      RngStream rng = make_stream(kRefinementStudySeed, rep);
      const Ensemble driving = sample_ensemble(grid, 2, kRateTwo, {}, rng);
      for (std::size_t level = 0; level < grid_sizes.size(); ++level) {
        const std::size_t steps = grid_sizes[level];
        const std::size_t stride = finest / steps;
        std::vector<double> f1(steps + 1), f2(steps + 1);
        for (std::size_t j = 0; j <= steps; ++j) {
          f1[j] = driving.lines[0][j * stride];
          f2[j] = driving.lines[1][j * stride];
        }
        acc[level] += skorokhod_reflect(f1, f2).alpha.back();
      }
    }
    for (double a : acc)
      out.statistics.push_back(a / static_cast<double>(kReplicates));
    return out;
  }

  if (statistic == "density-ks-m2") {
    constexpr std::size_t kReplicates = 2000;
    const double r = 1.0;
    const InitialData b{{1.0, 0.0}};
    const TimeGrid grid = make_grid(0.0, r, grid_sizes.back());
    RngStream rng = make_stream(kRefinementStudySeed, 0);
    const detail::StrideTerminals terminals =
        detail::sample_stride_terminals(2, b, kReplicates, grid, grid_sizes, rng);
    const auto cdf = [&](double h) { return detail::top_line_cdf(r, b.values, h); };
    for (const auto& level : terminals.tops)
      out.statistics.push_back(ks_statistic(level, cdf));
    return out;
  }

  throw std::invalid_argument("refinement_study: unknown statistic '" + statistic + "'");
}

}  // namespace blpp
