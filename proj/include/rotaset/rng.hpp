#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

namespace rotaset {

// Small splittable counter-based generator: every consumer derives its own
// stream from (seed, stream id), so results are independent of scheduling
// and thread count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

  Eigen::Vector2d point_in_unit_square() {
    double x = uniform();
    double y = uniform();
    return {x, y};
  }

  // Uniform on the closed disk of the given radius.
  Eigen::Vector2d point_in_disk(double radius) {
    double a = uniform() * 2.0 * M_PI;
    double r = radius * std::sqrt(uniform());
    return {r * std::cos(a), r * std::sin(a)};
  }

  Eigen::Vector2d direction() {
    double a = uniform() * 2.0 * M_PI;
    return {std::cos(a), std::sin(a)};
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
    mix.next();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rotaset
