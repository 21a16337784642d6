#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "blpp/core.hpp"
#include "blpp/errors.hpp"

namespace blpp {

// A point (t_{time_index}, line) of the line ensemble. Lines are numbered
// from 1 at the top; admissible paths move from a higher line number to a
// lower one, jumping down at grid times (jumps at both endpoints allowed).
struct LatticePoint {
  std::size_t time_index = 0;
  std::size_t line = 1;
};

namespace detail {

inline void check_endpoints(const Ensemble& ens, const LatticePoint& start,
                            const LatticePoint& end) {
  if (start.line < 1 || start.line > ens.n_lines() || end.line < 1 ||
      end.line > ens.n_lines())
    throw std::invalid_argument("lpp: line index out of range");
  if (start.time_index >= ens.grid.n_points() || end.time_index >= ens.grid.n_points())
    throw std::invalid_argument("lpp: time index out of range");
  if (end.line > start.line)
    throw std::invalid_argument("lpp: paths cannot move to a higher line number");
  if (end.time_index < start.time_index)
    throw std::invalid_argument("lpp: end time precedes start time");
}

}  // namespace detail

// Last passage values from `start` to every admissible (t_j, k).
// profile.lines[k-1][j] = sup over admissible paths start -> (t_j, k) of the
// collected increments; entries before start.time_index (and lines below
// start.line) are -infinity, meaning "unreachable".
//
// One dynamic-programming sweep, O(start.line * n_steps):
//   V_k(j) = max( V_k(j-1) + [f_k(j) - f_k(j-1)],  V_{k+1}(j) )
// with V_k(start) = 0 for every admissible k (a path may jump down any
// number of lines at the start time). Ties break toward staying on the
// current line.
inline Ensemble lpp_profile(const Ensemble& ens, const LatticePoint& start) {
  detail::check_endpoints(ens, start, LatticePoint{start.time_index, 1});
  const std::size_t n = ens.grid.n_points();
  const std::size_t L = start.line;
  const double ninf = -std::numeric_limits<double>::infinity();

  Ensemble prof;
  prof.grid = ens.grid;
  prof.lines.assign(ens.n_lines(), std::vector<double>(n, ninf));

  for (std::size_t k = L; k >= 1; --k) prof.lines[k - 1][start.time_index] = 0.0;
  for (std::size_t j = start.time_index + 1; j < n; ++j) {
    // Top of the admissible wedge first (line index L), then cascade down.
    for (std::size_t k = L; k >= 1; --k) {
      const double stay =
          prof.lines[k - 1][j - 1] + (ens.lines[k - 1][j] - ens.lines[k - 1][j - 1]);
      const double jump = (k < L) ? prof.lines[k][j] : ninf;
      prof.lines[k - 1][j] = (stay >= jump) ? stay : jump;
    }
  }
  return prof;
}

// Last passage values from every admissible (t_j, k) to `end`; the mirror
// sweep of lpp_profile. prof.lines[k-1][j] = value of (t_j, k) -> end, with
// -infinity where no admissible path exists.
inline Ensemble lpp_profile_to(const Ensemble& ens, const LatticePoint& end) {
  detail::check_endpoints(ens, LatticePoint{end.time_index, ens.n_lines()}, end);
  const std::size_t n = ens.grid.n_points();
  const std::size_t m = ens.n_lines();
  const double ninf = -std::numeric_limits<double>::infinity();

  Ensemble prof;
  prof.grid = ens.grid;
  prof.lines.assign(m, std::vector<double>(n, ninf));

  for (std::size_t k = end.line; k <= m; ++k) prof.lines[k - 1][end.time_index] = 0.0;
  for (std::size_t j = end.time_index; j-- > 0;) {
    for (std::size_t k = end.line; k <= m; ++k) {
      const double stay =
          prof.lines[k - 1][j + 1] + (ens.lines[k - 1][j + 1] - ens.lines[k - 1][j]);
      const double jump = (k > end.line) ? prof.lines[k - 2][j] : ninf;
      prof.lines[k - 1][j] = (stay >= jump) ? stay : jump;
    }
  }
  return prof;
}

// Point-to-point last passage value.
inline double lpp_value(const Ensemble& ens, const LatticePoint& start,
                        const LatticePoint& end) {
  detail::check_endpoints(ens, start, end);
  const Ensemble prof = lpp_profile(ens, start);
  return prof.lines[end.line - 1][end.time_index];
}

// Largest relative defect of the composition law
//   lpp(start -> end) = max_z { lpp(start -> (z,k)) + lpp((z,k) -> end) }
// over every intermediate line k and every admissible crossing time z.
// Exact in exact arithmetic (every path crosses each intermediate line), so
// the returned residual only measures accumulated rounding.
inline double metric_composition_residual(const Ensemble& ens, const LatticePoint& start,
                                          const LatticePoint& end) {
  detail::check_endpoints(ens, start, end);
  const Ensemble fwd = lpp_profile(ens, start);
  const Ensemble bwd = lpp_profile_to(ens, end);
  const double direct = fwd.lines[end.line - 1][end.time_index];
  const double scale = std::max(1.0, std::abs(direct));

  double worst = 0.0;
  for (std::size_t k = end.line; k <= start.line; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = start.time_index; j <= end.time_index; ++j)
      best = std::max(best, fwd.lines[k - 1][j] + bwd.lines[k - 1][j]);
    worst = std::max(worst, std::abs(best - direct) / scale);
  }
  return worst;
}

// Last passage percolation with a boundary: the vector
//   H_k(t_j) = max_{k <= l <= m} ( g_l + lpp((t_0, l) -> (t_j, k)) )
// computed in one sweep by seeding the profile recursion with the initial
// data. g must be non-increasing (g_1 >= g_2 >= ... >= g_m). This is the
// direct route against which the iterated-reflection construction is
// checked.
inline Ensemble lpp_with_boundary(const Ensemble& ens, const std::vector<double>& g) {
  const std::size_t m = ens.n_lines();
  if (g.size() != m)
    throw std::invalid_argument("lpp_with_boundary: need one initial value per line");
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (g[i] < g[i + 1])
      throw std::invalid_argument("lpp_with_boundary: initial data must be non-increasing");
  const std::size_t n = ens.grid.n_points();

  Ensemble out;
  out.grid = ens.grid;
  out.lines.assign(m, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < m; ++k) out.lines[k][0] = g[k];
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t k = m; k >= 1; --k) {
      const double stay =
          out.lines[k - 1][j - 1] + (ens.lines[k - 1][j] - ens.lines[k - 1][j - 1]);
      out.lines[k - 1][j] =
          (k < m) ? std::max(stay, out.lines[k][j]) : stay;
    }
  }
  return out;
}

}  // namespace blpp
