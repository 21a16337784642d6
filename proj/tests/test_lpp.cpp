#include <catch_amalgamated.hpp>

#include <cmath>

#include "blpp/core.hpp"
#include "blpp/lpp.hpp"
#include "blpp/reflect.hpp"
#include "oracle_lpp.hpp"

using namespace blpp;

namespace {

Ensemble random_ensemble(std::size_t m, std::size_t n_steps, std::uint64_t seed,
                         std::uint64_t stream) {
  const TimeGrid g = make_grid(0.0, 1.0, n_steps);
  RngStream rng = make_stream(seed, stream);
  return sample_ensemble(g, m, kRateTwo, {}, rng);
}

}  // namespace

TEST_CASE("lpp_value on a single line is the plain increment") {
  const Ensemble e = random_ensemble(1, 8, 11, 0);
  const double v = lpp_value(e, {2, 1}, {7, 1});
  REQUIRE(v == Catch::Approx(e.lines[0][7] - e.lines[0][2]).epsilon(1e-14));
}

TEST_CASE("lpp_value two lines, two steps, hand-checkable") {
  // Grid 0,1,2; f1 = (0, 1, 1), f2 = (0, 3, 3). Paths from (0,2) to (2,1)
  // jump at one of the three grid times; the best collects all of f2's rise.
  Ensemble e;
  e.grid = make_grid(0.0, 1.0, 2);
  e.lines = {{0.0, 1.0, 1.0}, {0.0, 3.0, 3.0}};
  REQUIRE(lpp_value(e, {0, 2}, {2, 1}) == Catch::Approx(3.0));
  // Forcing the jump at time 0 (start on line 1) collects only f1's rise.
  REQUIRE(lpp_value(e, {0, 1}, {2, 1}) == Catch::Approx(1.0));
}

TEST_CASE("lpp_value matches brute-force enumeration") {
  // Exhaustive cross-check on all admissible endpoint pairs of small random
  // ensembles (the enumerator walks every jump-time tuple).
  for (std::uint64_t s = 0; s < 12; ++s) {
    const std::size_t m = 2 + (s % 3);          // 2..4 lines
    const std::size_t n = 5 + (s % 4);          // 5..8 steps
    const Ensemble e = random_ensemble(m, n, 1000 + s, 0);
    for (std::size_t l0 = 1; l0 <= m; ++l0)
      for (std::size_t l1 = 1; l1 <= l0; ++l1)
        for (std::size_t j0 = 0; j0 + 1 < e.grid.n_points(); j0 += 2)
          for (std::size_t j1 = j0; j1 < e.grid.n_points(); j1 += 3) {
            const double dp = lpp_value(e, {j0, l0}, {j1, l1});
            const double bf = blpp_test::lpp_brute_force(e, {j0, l0}, {j1, l1});
            REQUIRE(dp == Catch::Approx(bf).margin(1e-12));
          }
  }
}

TEST_CASE("lpp_profile agrees with pointwise lpp_value calls") {
  const Ensemble e = random_ensemble(4, 16, 5, 1);
  const LatticePoint start{3, 4};
  const Ensemble prof = lpp_profile(e, start);
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t j = 4; j < e.grid.n_points(); j += 5)
      REQUIRE(prof.lines[k - 1][j] ==
              Catch::Approx(lpp_value(e, start, {j, k})).margin(1e-13));
  // Before the start time nothing is reachable.
  REQUIRE(std::isinf(prof.lines[0][0]));
  REQUIRE(prof.lines[0][0] < 0);
}

TEST_CASE("lpp_profile_to mirrors lpp_value") {
  const Ensemble e = random_ensemble(3, 12, 6, 2);
  const LatticePoint end{10, 1};
  const Ensemble prof = lpp_profile_to(e, end);
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t j = 0; j <= 10; j += 3)
      REQUIRE(prof.lines[k - 1][j] ==
              Catch::Approx(lpp_value(e, {j, k}, end)).margin(1e-13));
}

TEST_CASE("endpoint validation") {
  const Ensemble e = random_ensemble(2, 8, 3, 0);
  REQUIRE_THROWS_AS(lpp_value(e, {0, 1}, {5, 2}), std::invalid_argument);  // downhill only
  REQUIRE_THROWS_AS(lpp_value(e, {5, 2}, {2, 1}), std::invalid_argument);  // time reversed
  REQUIRE_THROWS_AS(lpp_value(e, {0, 3}, {5, 1}), std::invalid_argument);  // no such line
}

TEST_CASE("composition residual is at rounding level") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Ensemble e = random_ensemble(3 + (s % 3), 1 << 8, 77 + s, 0);
    const double r =
        metric_composition_residual(e, {0, e.n_lines()}, {e.grid.n_steps, 1});
    REQUIRE(r <= 1e-12);
  }
}

TEST_CASE("lpp_with_boundary equals explicit max over start lines") {
  const Ensemble e = random_ensemble(4, 32, 9, 4);
  const std::vector<double> g = {1.5, 0.75, 0.0, -2.0};
  const Ensemble h = lpp_with_boundary(e, g);
  // H_k(t) = max_l ( g_l + lpp((0,l) -> (t,k)) ), assembled from profiles.
  std::vector<Ensemble> profs;
  for (std::size_t l = 1; l <= 4; ++l) profs.push_back(lpp_profile(e, {0, l}));
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t j = 0; j < e.grid.n_points(); j += 7) {
      double want = -std::numeric_limits<double>::infinity();
      for (std::size_t l = k; l <= 4; ++l)
        want = std::max(want, g[l - 1] + profs[l - 1].lines[k - 1][j]);
      REQUIRE(h.lines[k - 1][j] == Catch::Approx(want).margin(1e-12));
    }
  REQUIRE_THROWS_AS(lpp_with_boundary(e, {0.0, 1.0, 2.0, 3.0}), std::invalid_argument);
}
