#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "blpp/quadrature.hpp"
#include "blpp/rng.hpp"
#include "blpp/sampling.hpp"
#include "blpp/stats.hpp"
#include "blpp/verify.hpp"

namespace {

using blpp::chapman_kolmogorov_residual;
using blpp::chi_square_p;
using blpp::diagonal_marginal_residual;
using blpp::InitialData;
using blpp::kolmogorov_q;
using blpp::KSReport;
using blpp::ks_statistic;
using blpp::ks_test;
using blpp::ks_two_sample;
using blpp::make_grid;
using blpp::make_stream;
using blpp::RefinementSeries;
using blpp::refinement_study;
using blpp::RngStream;
using blpp::UnsupportedSize;
using blpp::verify_density;

double identity_cdf(double u) { return std::clamp(u, 0.0, 1.0); }

}  // namespace

TEST_CASE("kolmogorov distribution: anchors, continuity, monotonicity") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(-1.0) == 1.0);
  // Classical table anchors for the asymptotic null distribution.
  CHECK(std::abs(kolmogorov_q(1.36) - 0.0494) < 5e-4);
  CHECK(std::abs(kolmogorov_q(0.828) - 0.4994) < 2e-3);
  CHECK(std::abs(kolmogorov_q(0.5) - 0.9639) < 5e-4);
  CHECK(kolmogorov_q(5.0) < 1e-20);
  // The two evaluation branches meet smoothly at the switch point.
  CHECK(std::abs(kolmogorov_q(1.18 - 1e-9) - kolmogorov_q(1.18 + 1e-9)) < 1e-6);
  double prev = 1.0;
  for (double lam = 0.05; lam < 3.0; lam += 0.05) {
    const double q = kolmogorov_q(lam);
    CHECK(q <= prev + 1e-15);
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
    prev = q;
  }
}

TEST_CASE("one-sample KS: statistic, p-values, argument checks") {
  // A single mid-point sample against the uniform law: D = 0.5 by definition.
  CHECK(ks_statistic({0.5}, identity_cdf) == 0.5);
  CHECK_THROWS_AS(ks_statistic({}, identity_cdf), std::invalid_argument);
  CHECK_THROWS_AS(ks_statistic({0.5}, [](double) { return 1.5; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(ks_test({0.1, 0.2, 0.3}, identity_cdf), std::invalid_argument);

  // Calibration under the null at N = 1e5.
  RngStream rng = make_stream(501, 0);
  std::vector<double> u(100000);
  for (double& v : u) v = rng.uniform01();
  const KSReport null_rep = ks_test(u, identity_cdf);
  CHECK(null_rep.sample_count == u.size());
  CHECK(null_rep.p_value > 1e-3);

  // Power: a 0.2 location shift at N = 1e4 is overwhelming evidence.
  std::vector<double> shifted(10000);
  RngStream rng2 = make_stream(501, 1);
  for (double& v : shifted) v = rng2.uniform01() + 0.2;
  CHECK(ks_test(shifted, identity_cdf).p_value < 1e-6);
}

TEST_CASE("two-sample KS separates equal laws from shifted ones") {
  RngStream rng = make_stream(502, 0);
  std::vector<double> a(2000), b(2000), c(2000);
  for (double& v : a) v = rng.gaussian();
  for (double& v : b) v = rng.gaussian();
  for (double& v : c) v = rng.gaussian() + 0.3;
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK_THROWS_AS(ks_two_sample({0.1}, a), std::invalid_argument);
}

TEST_CASE("chi-square tail probabilities") {
  CHECK(std::abs(chi_square_p(3.841, 1) - 0.05) < 5e-4);
  CHECK(chi_square_p(0.0, 5) == 1.0);
  const double mid = chi_square_p(399.0, 399);
  CHECK(mid > 0.4);
  CHECK(mid < 0.55);
  CHECK(chi_square_p(600.0, 399) < chi_square_p(400.0, 399));
  CHECK_THROWS_AS(chi_square_p(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(chi_square_p(-1.0, 3), std::invalid_argument);
}

TEST_CASE("single-line simulation matches the Gaussian terminal law") {
  RngStream rng = make_stream(503, 0);
  const auto report =
      verify_density(1, 1.0, InitialData{{0.0}}, 2000, make_grid(0.0, 1.0, 1024), rng);
  CHECK(report.top_marginal.p_value > 1e-3);
  CHECK(report.top_marginal.sample_count == 2000);
  CHECK_FALSE(report.chi_square_statistic.has_value());
  // Five subsampling levels: 64, 128, 256, 512, 1024.
  REQUIRE(report.refinement.grid_sizes.size() == 5);
  CHECK(report.refinement.grid_sizes.front() == 64);
  CHECK(report.refinement.grid_sizes.back() == 1024);
  CHECK(std::is_sorted(report.refinement.grid_sizes.begin(),
                       report.refinement.grid_sizes.end()));
  // The single line needs no reflection, so every level sees the same
  // terminal values and the same statistic.
  for (double d : report.refinement.statistics)
    CHECK(d == report.refinement.statistics.front());
}

TEST_CASE("verify_density argument checks") {
  RngStream rng = make_stream(503, 1);
  const auto grid = make_grid(0.0, 1.0, 256);
  CHECK_THROWS_AS(verify_density(2, 1.0, InitialData{{0.0}}, 100, grid, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_density(1, 2.0, InitialData{{0.0}}, 100, grid, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_density(1, 1.0, InitialData{{0.0}}, 5, grid, rng),
                  std::invalid_argument);
  const InitialData big{std::vector<double>(17, 0.0)};
  CHECK_THROWS_AS(verify_density(17, 1.0, big, 100, grid, rng), UnsupportedSize);
}

TEST_CASE("two-line simulation matches the exact transition density") {
  RngStream rng = make_stream(503, 2);
  const auto report = verify_density(2, 1.0, InitialData{{1.0, 0.0}}, 8000,
                                     make_grid(0.0, 1.0, 1 << 14), rng);
  CHECK(report.top_marginal.p_value > 1e-3);
  REQUIRE(report.chi_square_statistic.has_value());
  REQUIRE(report.chi_square_p.has_value());
  CHECK(*report.chi_square_p > 1e-3);
  // Common driving noise across levels: coarse grids can only miss contact
  // events, so the KS distance improves as the grid refines (small slack for
  // the sampling noise left after the common-random-number pairing).
  const auto& d = report.refinement.statistics;
  REQUIRE(d.size() == 5);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] <= d[i - 1] + 0.005);
  CHECK(d.back() < d.front());
}

TEST_CASE("KS p-values are uniform under the null") {
  std::vector<double> pvals;
  for (std::uint64_t run = 0; run < 200; ++run) {
    RngStream rng = make_stream(1000, run);
    pvals.push_back(verify_density(1, 1.0, InitialData{{0.0}}, 1000,
                                   make_grid(0.0, 1.0, 256), rng)
                        .top_marginal.p_value);
  }
  CHECK(ks_test(pvals, identity_cdf).p_value > 1e-3);
}

TEST_CASE("semigroup property of the transition density") {
  // Single line: plain heat-kernel convolution, quadrature error only.
  CHECK(chapman_kolmogorov_residual(1, 0.5, 0.5, InitialData{{0.3}}) < 1e-8);

  // Two lines: the nested convolution over the ordered region reproduces the
  // direct evaluation, from both homogeneous and staggered starts.
  const double flat = chapman_kolmogorov_residual(2, 0.5, 0.5, InitialData{{0.0, 0.0}});
  CHECK(flat < 1e-4);
  const double staggered =
      chapman_kolmogorov_residual(2, 0.5, 0.5, InitialData{{1.0, 0.0}});
  CHECK(staggered < 1e-4);
  // Quadrature is deterministic: re-evaluation is bitwise identical.
  CHECK(chapman_kolmogorov_residual(2, 0.5, 0.5, InitialData{{0.0, 0.0}}) == flat);

  CHECK_THROWS_AS(chapman_kolmogorov_residual(3, 0.5, 0.5, InitialData{{0.0, 0.0, 0.0}}),
                  UnsupportedSize);
  CHECK_THROWS_AS(chapman_kolmogorov_residual(1, -0.5, 0.5, InitialData{{0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(chapman_kolmogorov_residual(2, 0.5, 0.5, InitialData{{0.0}}),
                  std::invalid_argument);
}

TEST_CASE("diagonal marginal identity for the two-line entrance law") {
  for (double r : {0.5, 1.0, 2.0}) CHECK(diagonal_marginal_residual(r) < 1e-6);
  CHECK(diagonal_marginal_residual(1.0) == diagonal_marginal_residual(1.0));
  CHECK_THROWS_AS(diagonal_marginal_residual(0.0), std::invalid_argument);
}

TEST_CASE("diagonal identity at the degenerate point via the confluent limit") {
  // Approach the tie x^1_1 = x^2_2 along a shrinking gap and extrapolate the
  // off-diagonal ratio of the two sides to gap -> 0; it must agree with the
  // direct evaluation at the tie.
  const double r = 1.0;
  const double u = 0.4;
  const auto ratio = [&](double gap) {
    const double v = u + gap;
    const double lhs = blpp::warren_density(r, {v, u}, {0.0, 0.0}).value.value();
    const double rhs = blpp::integrate_adaptive(
        [&](double y) { return blpp::gt_entrance_density(2, r, {y, v}).value.value(); },
        -(10.0 * std::sqrt(2.0 * r) + std::abs(u) + 1.0), u, 1e-10);
    return lhs / rhs;
  };
  // Richardson step from gaps h and h/2 cancels the linear term.
  const double extrapolated = 2.0 * ratio(0.1) - ratio(0.2);
  CHECK(std::abs(extrapolated - 1.0) < 1e-3);
  CHECK(std::abs(ratio(0.0) - 1.0) < 1e-9);
}

TEST_CASE("refinement studies isolate discretization bias") {
  const auto flat = refinement_study("constant", {64, 128, 256});
  REQUIRE(flat.statistics.size() == 3);
  for (double v : flat.statistics) CHECK(v == 42.0);

  // The terminal compensator of the two-line reflection is a running-max
  // functional: refining the grid only adds candidate contact times, so the
  // common-noise mean rises monotonically toward the continuum value.
  const auto alpha = refinement_study("alpha-terminal-m2", {128, 256, 512, 1024});
  REQUIRE(alpha.statistics.size() == 4);
  for (std::size_t i = 1; i < alpha.statistics.size(); ++i)
    CHECK(alpha.statistics[i] >= alpha.statistics[i - 1]);

  const auto ks = refinement_study("density-ks-m2", {1024, 4096, 16384});
  REQUIRE(ks.statistics.size() == 3);
  for (std::size_t i = 1; i < ks.statistics.size(); ++i)
    CHECK(ks.statistics[i] <= ks.statistics[i - 1] + 0.005);

  CHECK_THROWS_AS(refinement_study("constant", {100, 200, 400}),
                  std::invalid_argument);
  CHECK_THROWS_AS(refinement_study("constant", {64, 128}), std::invalid_argument);
  CHECK_THROWS_AS(refinement_study("constant", {128, 128, 256}),
                  std::invalid_argument);
  CHECK_THROWS_AS(refinement_study("no-such-statistic", {64, 128, 256}),
                  std::invalid_argument);
}

TEST_CASE("change of measure integrates to one") {
  // X ~ q_r(.; 0,0) drawn exactly, so E[q_r(X; b)/q_r(X; 0)] = 1.
  RngStream rng = make_stream(2024, 0);
  const std::vector<double> b = {1.0, 0.0};
  const std::size_t n = 20000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const blpp::TwoLineSample s = blpp::exact_two_line_sample(1.0, rng);
    const double v = blpp::rn_ratio(1.0, {s.top, s.bottom}, b).value.value();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double se =
      std::sqrt((sumsq / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}
