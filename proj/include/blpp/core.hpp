#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "blpp/errors.hpp"
#include "blpp/rng.hpp"

namespace blpp {

// Uniform time grid on [t0, t1] with n_steps steps (n_steps + 1 sample
// points). Everything downstream (last-passage sweeps, reflections, dyadic
// refinement) assumes uniform spacing, so only uniform grids exist.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n_steps = 1;
  double delta = 1.0;

  std::size_t n_points() const { return n_steps + 1; }
  double time(std::size_t j) const { return t0 + static_cast<double>(j) * delta; }
};

inline constexpr std::size_t kMaxGridPoints = (std::size_t{1} << 20);

// Default diffusion rate: quadratic variation 2t, i.e. increments have
// variance 2*delta per step.
inline constexpr double kRateTwo = 2.0;

inline TimeGrid make_grid(double t0, double t1, std::size_t n_steps) {
  if (!(t1 > t0)) throw std::invalid_argument("make_grid: need t1 > t0");
  if (n_steps < 1) throw std::invalid_argument("make_grid: need n_steps >= 1");
  if (n_steps + 1 > kMaxGridPoints)
    throw UnsupportedSize("make_grid: grid exceeds 2^20 sample points");
  TimeGrid g;
  g.t0 = t0;
  g.t1 = t1;
  g.n_steps = n_steps;
  g.delta = (t1 - t0) / static_cast<double>(n_steps);
  return g;
}

// A scalar path sampled on a grid. values.size() == grid.n_points().
struct SampledPath {
  TimeGrid grid;
  std::vector<double> values;
};

// A stack of paths on a common grid. lines[0] is the top line (line 1 in
// the usual numbering H_1 >= H_2 >= ...), lines[m-1] the bottom.
struct Ensemble {
  TimeGrid grid;
  std::vector<std::vector<double>> lines;

  std::size_t n_lines() const { return lines.size(); }
};

// Brownian path on the grid: values[0] = start, independent Gaussian
// increments with variance rate * delta.
inline SampledPath sample_bm(const TimeGrid& grid, double rate, double start,
                             RngStream& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("sample_bm: need rate > 0");
  SampledPath p;
  p.grid = grid;
  p.values.resize(grid.n_points());
  p.values[0] = start;
  const double sd = std::sqrt(rate * grid.delta);
  for (std::size_t j = 1; j < p.values.size(); ++j)
    p.values[j] = p.values[j - 1] + sd * rng.gaussian();
  return p;
}

// m independent Brownian lines started from `starts` (top line first).
// If `starts` is empty all lines start at 0.
inline Ensemble sample_ensemble(const TimeGrid& grid, std::size_t m, double rate,
                                const std::vector<double>& starts, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("sample_ensemble: need at least one line");
  if (!starts.empty() && starts.size() != m)
    throw std::invalid_argument("sample_ensemble: starts must be empty or have one entry per line");
  Ensemble e;
  e.grid = grid;
  e.lines.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s0 = starts.empty() ? 0.0 : starts[i];
    e.lines.push_back(sample_bm(grid, rate, s0, rng).values);
  }
  return e;
}

// CSV dump with enough digits to round-trip doubles.
inline void write_csv(std::ostream& os, const SampledPath& p) {
  os.precision(17);
  os << "t,v\n";
  for (std::size_t j = 0; j < p.values.size(); ++j)
    os << p.grid.time(j) << ',' << p.values[j] << '\n';
}

inline void write_csv(std::ostream& os, const Ensemble& e, std::uint64_t replicate) {
  os.precision(17);
  for (std::size_t j = 0; j < e.grid.n_points(); ++j) {
    os << replicate << ',' << e.grid.time(j);
    for (const auto& line : e.lines) os << ',' << line[j];
    os << '\n';
  }
}

}  // namespace blpp
