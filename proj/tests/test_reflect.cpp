#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "blpp/core.hpp"
#include "blpp/lpp.hpp"
#include "blpp/reflect.hpp"

using namespace blpp;

namespace {

Ensemble random_ensemble(std::size_t m, std::size_t n_steps, std::uint64_t seed) {
  const TimeGrid g = make_grid(0.0, 1.0, n_steps);
  RngStream rng = make_stream(seed, 0);
  return sample_ensemble(g, m, kRateTwo, {}, rng);
}

}  // namespace

TEST_CASE("skorokhod_reflect on a hand-checkable pair") {
  // f1 flat at 0; f2 rises to 2 then falls back. alpha tracks the running
  // max of f2 - f1 clamped below at 0.
  const std::vector<double> f1 = {0, 0, 0, 0, 0};
  const std::vector<double> f2 = {-1, 1, 2, 0, -3};
  const ReflectionOutput r = skorokhod_reflect(f1, f2);
  const std::vector<double> want_alpha = {0, 1, 2, 2, 2};
  for (std::size_t j = 0; j < 5; ++j) {
    REQUIRE(r.alpha[j] == want_alpha[j]);
    REQUIRE(r.w_top[j] == f1[j] + want_alpha[j]);
    REQUIRE(r.w_bottom[j] == f2[j] - want_alpha[j]);
  }
}

TEST_CASE("reflection output dominates both inputs on top") {
  const Ensemble e = random_ensemble(2, 1 << 10, 21);
  const ReflectionOutput r = skorokhod_reflect(e.lines[0], e.lines[1]);
  for (std::size_t j = 0; j < e.grid.n_points(); ++j) {
    REQUIRE(r.w_top[j] >= e.lines[0][j]);
    REQUIRE(r.w_top[j] >= e.lines[1][j] - 1e-15);
    REQUIRE(r.w_top[j] >= r.w_bottom[j]);
  }
}

TEST_CASE("two-line transform top equals the two-start last passage max") {
  // Top of the transform at t equals max_i ( f_i(0) + [(0,i) -> (t,1)] ),
  // including when the lines start out of order.
  const TimeGrid g = make_grid(0.0, 1.0, 1 << 9);
  RngStream rng = make_stream(314, 5);
  Ensemble e = sample_ensemble(g, 2, kRateTwo, {-0.5, 1.25}, rng);
  const ReflectionOutput r = skorokhod_reflect(e.lines[0], e.lines[1]);

  const Ensemble p1 = lpp_profile(e, {0, 1});
  const Ensemble p2 = lpp_profile(e, {0, 2});
  for (std::size_t j = 0; j < g.n_points(); j += 13) {
    const double want =
        std::max(e.lines[0][0] + p1.lines[0][j], e.lines[1][0] + p2.lines[0][j]);
    REQUIRE(r.w_top[j] == Catch::Approx(want).margin(1e-12));
  }
}

TEST_CASE("two-line transform preserves last passage values") {
  // Last passage from (0,2) to (t,1) is the same whether computed across
  // the original pair or across the transformed pair.
  const Ensemble e = random_ensemble(2, 1 << 10, 99);
  const ReflectionOutput r = skorokhod_reflect(e.lines[0], e.lines[1]);
  Ensemble w;
  w.grid = e.grid;
  w.lines = {r.w_top, r.w_bottom};
  const Ensemble pe = lpp_profile(e, {0, 2});
  const Ensemble pw = lpp_profile(w, {0, 2});
  for (std::size_t j = 0; j < e.grid.n_points(); j += 37)
    REQUIRE(pw.lines[0][j] == Catch::Approx(pe.lines[0][j]).margin(1e-12));
}

TEST_CASE("brownian_tasep keeps lines ordered and pinned to initial data") {
  const Ensemble e = random_ensemble(5, 1 << 10, 3);
  const InitialData g{{2.0, 1.0, 0.5, 0.5, -1.0}};
  const Ensemble h = brownian_tasep(e, g);
  for (std::size_t k = 0; k < 5; ++k) REQUIRE(h.lines[k][0] == g.values[k]);
  for (std::size_t k = 0; k + 1 < 5; ++k)
    for (std::size_t j = 0; j < e.grid.n_points(); ++j)
      REQUIRE(h.lines[k][j] >= h.lines[k + 1][j] - 1e-12);
}

TEST_CASE("brownian_tasep flat start equals the melon top construction") {
  // With g = 0 the top line is the all-the-way last passage value.
  const Ensemble e = random_ensemble(4, 1 << 10, 17);
  const InitialData g{{0.0, 0.0, 0.0, 0.0}};
  const Ensemble h = brownian_tasep(e, g);
  const Ensemble prof = lpp_profile(e, {0, 4});
  for (std::size_t j = 0; j < e.grid.n_points(); j += 41)
    REQUIRE(h.lines[0][j] == Catch::Approx(prof.lines[0][j]).margin(1e-12));
}

TEST_CASE("brownian_tasep input validation") {
  const Ensemble e = random_ensemble(3, 64, 5);
  REQUIRE_THROWS_AS(brownian_tasep(e, InitialData{{0.0, 1.0, 2.0}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(brownian_tasep(e, InitialData{{0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("extract_alpha recovers non-decreasing compensators supported on contact") {
  const Ensemble e = random_ensemble(4, 1 << 12, 23);
  const InitialData g{{1.0, 0.5, 0.0, -0.5}};
  const Ensemble h = brownian_tasep(e, g);
  const AlphaDecomposition dec = extract_alpha(h, e, g);
  REQUIRE(dec.alphas.size() == 3);
  REQUIRE(dec.support_residuals.size() == 3);
  for (const auto& a : dec.alphas) {
    REQUIRE(a.front() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(a.back() > 0.0);  // contact happens with overwhelming probability
  }
  // The compensator only moves near contact: on this grid the observed gap
  // at increase steps stays within a few grid moduli, far below O(1).
  for (double res : dec.support_residuals) REQUIRE(res < 0.25);
}

TEST_CASE("alpha support residual shrinks like sqrt(delta) under refinement") {
  // One fine path, subsampled to coarser dyadic grids; the residual at each
  // level is computed from the same underlying realization. Expect roughly
  // a 1/sqrt(2) drop per halving, so a factor <= ~0.5 over two halvings and
  // monotone decrease level to level (with a little statistical slack).
  const std::size_t fine_steps = 1 << 14;
  const Ensemble fine = random_ensemble(2, fine_steps, 101);
  const InitialData g{{0.0, 0.0}};

  std::vector<double> residuals;
  for (std::size_t lvl = 0; lvl < 3; ++lvl) {
    const std::size_t stride = std::size_t{1} << (2 * (2 - lvl));  // 16, 4, 1
    Ensemble sub;
    sub.grid = make_grid(fine.grid.t0, fine.grid.t1, fine_steps / stride);
    sub.lines.assign(2, {});
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t j = 0; j < fine.grid.n_points(); j += stride)
        sub.lines[k].push_back(fine.lines[k][j]);
    const Ensemble h = brownian_tasep(sub, g);
    residuals.push_back(extract_alpha(h, sub, g).support_residuals[0]);
  }
  REQUIRE(residuals[1] < residuals[0]);
  REQUIRE(residuals[2] < residuals[1]);
  // Each level refines delta by 4x, so sqrt scaling predicts ~1/2 per level.
  REQUIRE(residuals[2] <= 0.6 * residuals[0]);
}

TEST_CASE("depth law pmf is a probability vector with cubic tail") {
  DepthLaw law;
  law.kind = DepthLaw::Kind::kTruncatedCubicTail;
  law.max_depth = 4;
  law.c = 0.02;
  const std::vector<double> pmf = depth_pmf(law);
  REQUIRE(pmf.size() == 4);
  double sum = 0.0;
  for (double p : pmf) {
    REQUIRE(p > 0.0);
    sum += p;
  }
  REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-12));
  // Survival matches exp(-c k^3) normalised at k = 1.
  const double s2 = pmf[1] + pmf[2] + pmf[3];
  REQUIRE(s2 == Catch::Approx(std::exp(-law.c * (8.0 - 1.0))).epsilon(1e-12));

  DepthLaw fixed;
  fixed.kind = DepthLaw::Kind::kFixed;
  fixed.max_depth = 3;
  const std::vector<double> fp = depth_pmf(fixed);
  REQUIRE(fp[2] == 1.0);
  REQUIRE(fp[0] == 0.0);
}

TEST_CASE("sample_random_depth_blpp respects the generator and depth law") {
  const TimeGrid grid = make_grid(0.0, 1.0, 256);
  DepthLaw law;
  law.kind = DepthLaw::Kind::kTruncatedCubicTail;
  law.max_depth = 3;
  law.c = 0.05;
  RngStream rng = make_stream(5150, 0);
  auto gen = [](std::size_t depth) {
    std::vector<double> g(depth);
    for (std::size_t i = 0; i < depth; ++i) g[i] = static_cast<double>(depth - i);
    return g;
  };
  std::vector<std::size_t> counts(4, 0);
  for (int i = 0; i < 200; ++i) {
    const RandomDepthSample s = sample_random_depth_blpp(grid, law, gen, kRateTwo, rng);
    REQUIRE(s.depth >= 1);
    REQUIRE(s.depth <= 3);
    REQUIRE(s.system.n_lines() == s.depth);
    REQUIRE(s.system.lines[0][0] == static_cast<double>(s.depth));
    ++counts[s.depth];
  }
  REQUIRE(counts[1] > 0);
  REQUIRE(counts[3] > 0);
}
