#pragma once

#include <cmath>
#include <stdexcept>

#include "blpp/rng.hpp"

namespace blpp {

struct TwoLineSample {
  double top = 0.0;
  double bottom = 0.0;
};

// Exact draw of the two-line reflected system at time r started from (0, 0),
// with no time discretisation. Writing the driving pair as sum and
// difference, the difference W = B2 - B1 is a Brownian motion of variance
// rate 4 independent of the sum. The top line is B1(r) + M with
// M = max(0, max_s W(s)), and the running maximum given the endpoint
// W(r) = z has the reflection-principle law
//   P(M >= s | W(r) = z) = exp(-s (s - z) / (2 r)),   s >= max(z, 0),
// which inverts in closed form to s = (z + sqrt(z^2 - 8 r ln U)) / 2.
inline TwoLineSample exact_two_line_sample(double r, RngStream& rng) {
  if (!(r > 0.0)) throw std::invalid_argument("exact_two_line_sample: need r > 0");
  const double sd = std::sqrt(4.0 * r);
  const double z = sd * rng.gaussian();    // B2(r) - B1(r)
  const double sum = sd * rng.gaussian();  // B2(r) + B1(r), independent
  double u = rng.uniform01();
  while (u <= 0.0) u = rng.uniform01();
  const double m = 0.5 * (z + std::sqrt(z * z - 8.0 * r * std::log(u)));
  const double b1 = 0.5 * (sum - z);
  const double b2 = 0.5 * (sum + z);
  return TwoLineSample{b1 + m, b2};
}

}  // namespace blpp
