#pragma once

#include <cstdint>
#include <random>

namespace blpp {

// Identifies one reproducible random stream. Streams are pure functions of
// (master_seed, stream_index): replicate k of a Monte Carlo run always uses
// stream_index = k, so results do not depend on scheduling or thread count.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

namespace detail {

// splitmix64 output function (Vigna). Used only to turn (master_seed,
// stream_index) into a well-mixed engine seed; the stream itself is a
// std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// One random stream: a mt19937_64 engine plus a normal sampler. Distinct
// stream indices go through two rounds of splitmix64 mixing, so nearby
// (seed, index) pairs land on unrelated engine states.
class RngStream {
 public:
  explicit RngStream(const RngSpec& spec)
      : engine_(detail::splitmix64(detail::splitmix64(spec.master_seed) ^
                                   detail::splitmix64(~spec.stream_index))) {}

  double uniform01() {
    // 53-bit mantissa in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

inline RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return RngStream(RngSpec{master_seed, stream_index});
}

}  // namespace blpp
