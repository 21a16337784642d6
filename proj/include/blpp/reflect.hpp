#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "blpp/core.hpp"
#include "blpp/errors.hpp"
#include "blpp/lpp.hpp"
#include "blpp/rng.hpp"

namespace blpp {

// Non-increasing starting configuration g_1 >= g_2 >= ... >= g_m.
struct InitialData {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  void validate() const {
    if (values.empty()) throw std::invalid_argument("InitialData: empty");
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      if (values[i] < values[i + 1])
        throw std::invalid_argument("InitialData: values must be non-increasing");
  }
};

struct ReflectionOutput {
  std::vector<double> w_top;
  std::vector<double> w_bottom;
  std::vector<double> alpha;  // running reflection amount, non-decreasing from >= 0
};

// Two-line reflection (Pitman-type transform):
//   alpha(t) = max( max_{s <= t} (f2(s) - f1(s)), 0 )
//   w_top    = f1 + alpha
//   w_bottom = f2 - alpha
// w_top(t) >= max(f1(t), f2(t)) and w_top - f1 only grows while the two
// transformed lines touch.
inline ReflectionOutput skorokhod_reflect(const std::vector<double>& f1,
                                          const std::vector<double>& f2) {
  if (f1.size() != f2.size() || f1.empty())
    throw std::invalid_argument("skorokhod_reflect: paths must share a non-empty grid");
  const std::size_t n = f1.size();
  ReflectionOutput out;
  out.w_top.resize(n);
  out.w_bottom.resize(n);
  out.alpha.resize(n);
  double run = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    run = std::max(run, f2[j] - f1[j]);
    out.alpha[j] = run;
    out.w_top[j] = f1[j] + run;
    out.w_bottom[j] = f2[j] - run;
  }
  return out;
}

// Interacting system driven by m independent lines started from g: the
// bottom line is g_m + B_m, and each line above is the top of a two-line
// reflection of (g_k + B_k) off the line below,
//   H_m = g_m + B_m,   H_k = top of reflect(g_k + B_k, H_{k+1}).
//
// The same vector admits a closed last-passage form,
//   H_k(t) = max_{k <= l <= m} ( g_l + [(t_0,l) -> (t,k)] ),
// and the two constructions agree exactly; both are computed here and a
// ContractViolation is raised if they drift apart beyond accumulated
// rounding (a few ulps per grid step). Returns the reflected construction.
inline Ensemble brownian_tasep(const Ensemble& driving, const InitialData& g) {
  g.validate();
  const std::size_t m = driving.n_lines();
  if (g.size() != m)
    throw std::invalid_argument("brownian_tasep: initial data size must match line count");
  const std::size_t n = driving.grid.n_points();

  Ensemble out;
  out.grid = driving.grid;
  out.lines.assign(m, {});
  // Bottom line is untouched by the reflections.
  out.lines[m - 1] = driving.lines[m - 1];
  for (std::size_t j = 0; j < n; ++j) out.lines[m - 1][j] += g.values[m - 1];
  for (std::size_t k = m - 1; k >= 1; --k) {
    std::vector<double> upper = driving.lines[k - 1];
    for (double& v : upper) v += g.values[k - 1];
    out.lines[k - 1] = skorokhod_reflect(upper, out.lines[k]).w_top;
  }

  // Dual-construction self test. Rounding differs between the two sweeps by
  // O(n * eps * scale) in the worst case; the guard scales accordingly.
  const Ensemble direct = lpp_with_boundary(driving, g.values);
  double scale = 1.0;
  for (const auto& line : out.lines)
    for (double v : line) scale = std::max(scale, std::abs(v));
  const double tol =
      std::max(1e-12, 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon()) *
      scale;
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(out.lines[k][j] - direct.lines[k][j]) > tol)
        throw ContractViolation("brownian_tasep: reflected and last-passage constructions disagree");
  return out;
}

struct AlphaDecomposition {
  // alphas[i] is the compensator of line i+1 (only the top m-1 lines carry
  // one; the bottom line is its driving path verbatim).
  std::vector<std::vector<double>> alphas;
  // Largest gap H_k - H_{k+1} observed at a step where alpha_k increased.
  std::vector<double> support_residuals;
};

// Recovers alpha_k = H_k - (g_k + B_k) for k = 1..m-1 and verifies the
// decomposition's structure: alpha_k starts at 0, never decreases (beyond
// rounding slack), and only increases while lines k and k+1 are in contact.
// The support residual per line is the evidence for the last point: it
// shrinks like sqrt(delta) under grid refinement.
inline AlphaDecomposition extract_alpha(const Ensemble& tasep, const Ensemble& driving,
                                        const InitialData& g,
                                        double increase_threshold = 1e-9) {
  g.validate();
  const std::size_t m = tasep.n_lines();
  if (driving.n_lines() != m || g.size() != m)
    throw std::invalid_argument("extract_alpha: ensemble/initial data sizes disagree");
  const std::size_t n = tasep.grid.n_points();

  double scale = 1.0;
  for (const auto& line : tasep.lines)
    for (double v : line) scale = std::max(scale, std::abs(v));
  const double slack = 1e-12 * scale;

  AlphaDecomposition dec;
  dec.alphas.reserve(m - 1);
  dec.support_residuals.reserve(m - 1);
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<double> alpha(n);
    for (std::size_t j = 0; j < n; ++j)
      alpha[j] = tasep.lines[k - 1][j] - (g.values[k - 1] + driving.lines[k - 1][j]);
    if (std::abs(alpha[0]) > slack)
      throw ContractViolation("extract_alpha: compensator does not start at zero");
    double residual = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double inc = alpha[j] - alpha[j - 1];
      if (inc < -slack)
        throw ContractViolation("extract_alpha: compensator decreases");
      if (inc > increase_threshold) {
        // The construction lands in exact contact at the end of an increase
        // step, so the informative quantity is the gap still open when the
        // step began; it is bounded by the one-step path modulus.
        const double gap0 = tasep.lines[k - 1][j - 1] - tasep.lines[k][j - 1];
        residual = std::max(residual, std::max(0.0, gap0));
      }
    }
    dec.alphas.push_back(std::move(alpha));
    dec.support_residuals.push_back(residual);
  }
  return dec;
}

// Law of the random number of driving lines.
struct DepthLaw {
  enum class Kind { kFixed, kTruncatedCubicTail };
  Kind kind = Kind::kFixed;
  std::size_t max_depth = 1;
  double c = 1.0;  // tail rate for the cubic-tail law: P(depth >= k) ~ exp(-c k^3)

  void validate() const {
    if (max_depth < 1) throw std::invalid_argument("DepthLaw: max_depth >= 1 required");
    if (kind == Kind::kTruncatedCubicTail && !(c > 0.0))
      throw std::invalid_argument("DepthLaw: cubic-tail rate must be positive");
  }
};

// P(depth = k) for k = 1..max_depth. The cubic-tail law has survival
// function proportional to exp(-c k^3), truncated and renormalised so the
// probabilities sum to one.
inline std::vector<double> depth_pmf(const DepthLaw& law) {
  law.validate();
  std::vector<double> pmf(law.max_depth, 0.0);
  if (law.kind == DepthLaw::Kind::kFixed) {
    pmf.back() = 1.0;
    return pmf;
  }
  const auto survival = [&](std::size_t k) {
    const double kk = static_cast<double>(k);
    return std::exp(-law.c * (kk * kk * kk - 1.0));  // normalised so S(1) = 1
  };
  for (std::size_t k = 1; k <= law.max_depth; ++k)
    pmf[k - 1] = survival(k) - (k < law.max_depth ? survival(k + 1) : 0.0);
  return pmf;
}

inline std::size_t sample_depth(const DepthLaw& law, RngStream& rng) {
  const std::vector<double> pmf = depth_pmf(law);
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    if (u < acc) return k + 1;
  }
  return pmf.size();
}

struct RandomDepthSample {
  std::size_t depth = 0;
  Ensemble system;
};

// Mixture construction: draw a depth L, then build the depth-L interacting
// system from fresh driving lines with initial data supplied per depth.
// Conditional on L = k this is exactly the fixed depth-k construction.
template <typename InitialDataGen>
RandomDepthSample sample_random_depth_blpp(const TimeGrid& grid, const DepthLaw& law,
                                           InitialDataGen&& g_gen, double rate,
                                           RngStream& rng) {
  const std::size_t depth = sample_depth(law, rng);
  InitialData g{g_gen(depth)};
  g.validate();
  if (g.size() != depth)
    throw std::invalid_argument("sample_random_depth_blpp: generator returned wrong size");
  const Ensemble driving = sample_ensemble(grid, depth, rate, {}, rng);
  return RandomDepthSample{depth, brownian_tasep(driving, g)};
}

}  // namespace blpp
