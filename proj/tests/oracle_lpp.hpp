#pragma once

// Brute-force enumeration oracle for last passage values on small grids.
// A path from (j0, L) down to (j1, K) is determined by its jump times
// j0 <= z_{L-1} <= z_{L-2} <= ... <= z_K <= j1 (the time it leaves each
// line); the value is the sum of the per-line increments. Enumerating all
// non-decreasing jump-time tuples is exponential but fine for the small
// cases this oracle is rated for (few lines, ~10 grid points).

#include <cstddef>
#include <limits>
#include <vector>

#include "blpp/core.hpp"
#include "blpp/lpp.hpp"

namespace blpp_test {

inline double lpp_brute_force(const blpp::Ensemble& ens, const blpp::LatticePoint& start,
                              const blpp::LatticePoint& end) {
  const std::size_t L = start.line, K = end.line;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> z(L - K, 0);

  // Recursively choose jump times z[i] (departure from line L - i), each at
  // least the previous one, then score the resulting path.
  auto rec = [&](auto&& self, std::size_t i, std::size_t lo) -> void {
    if (i == z.size()) {
      double v = 0.0;
      std::size_t seg_start = start.time_index;
      for (std::size_t d = 0; d < z.size(); ++d) {
        const std::size_t line = L - d;  // 1-based
        v += ens.lines[line - 1][z[d]] - ens.lines[line - 1][seg_start];
        seg_start = z[d];
      }
      v += ens.lines[K - 1][end.time_index] - ens.lines[K - 1][seg_start];
      if (v > best) best = v;
      return;
    }
    for (std::size_t t = lo; t <= end.time_index; ++t) {
      z[i] = t;
      self(self, i + 1, t);
    }
  };
  rec(rec, 0, start.time_index);
  return best;
}

}  // namespace blpp_test
