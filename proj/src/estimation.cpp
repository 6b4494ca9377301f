#include "rotaset/estimation.hpp"

#include "rotaset/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotaset {

Vector2d birkhoff_vector(const LiftMap& map, const Vector2d& z, long long n) {
  if (n < 1) throw std::invalid_argument("orbit length must be >= 1");
  Vector2d w = map.iterate(z, n);
  return (w - z) / static_cast<double>(n);
}

OrbitEstimate birkhoff_estimate(const LiftMap& map, const Vector2d& z, long long n) {
  OrbitEstimate est;
  est.base = z;
  est.length = n;
  est.vector = birkhoff_vector(map, z, n);
  est.error_radius = 2.0 * map.phi_sup_bound() / static_cast<double>(n);
  return est;
}

LebesgueVector lebesgue_rotation_vector(const LiftMap& map, int resolution) {
  if (resolution < 2) throw std::invalid_argument("quadrature resolution must be >= 2");
  Vector2d sum(0, 0);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i)
      sum += map.displacement(Vector2d((i + 0.5) / resolution, (j + 0.5) / resolution));
  LebesgueVector lv;
  lv.value = sum / static_cast<double>(resolution) / static_cast<double>(resolution);
  lv.error_bound = map.omega_phi(std::sqrt(2.0) / (2.0 * resolution));
  lv.resolution = resolution;
  return lv;
}

OrbitHullEstimate orbit_hull_estimate(const LiftMap& map, int sample_count, long long n,
                                      std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample count must be >= 1");
  if (n < 1) throw std::invalid_argument("orbit length must be >= 1");
  OrbitHullEstimate est;
  est.samples.resize(sample_count);
  // One jittered sample per coarse cell, row-major, so the estimate is
  // reproducible and monotone under growing sample counts at a fixed seed.
  int strata = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sample_count))));
  for (int s = 0; s < sample_count; ++s) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(s));
    int ci = s % strata, cj = s / strata;
    Vector2d z((ci + rng.uniform()) / strata, (cj + rng.uniform()) / strata);
    est.samples[s] = birkhoff_estimate(map, z, n);
  }
  std::vector<RationalVec2> pts;
  pts.reserve(est.samples.size());
  for (const OrbitEstimate& oe : est.samples) pts.push_back(exact(oe.vector));
  est.hull = ConvexRationalPolygon::hull(pts);
  est.error_radius = 2.0 * map.phi_sup_bound() / static_cast<double>(n);
  return est;
}

PeriodicOrbitResult find_periodic_orbit(const LiftMap& map, const RationalVec2& target,
                                        int grid_resolution, double tolerance) {
  ReducedVector rv = reduce_to_common_denominator(target);
  if (rv.q < 1 || rv.q > 1'000'000) throw std::invalid_argument("target period out of range");
  long long q = rv.q.convert_to<long long>();
  Vector2d p(rv.p1.convert_to<double>(), rv.p2.convert_to<double>());

  auto residual = [&](const Vector2d& z) { return (map.iterate(z, q) - z - p).norm(); };

  PeriodicOrbitResult res;
  res.period = q;

  // Coarse scan over grid points (i/R, j/R); ties keep the first hit, so a
  // residual-flat map returns the grid origin.
  struct Candidate {
    Vector2d z;
    double r;
  };
  std::vector<Candidate> best;
  const std::size_t keep = 8;
  for (int j = 0; j < grid_resolution; ++j)
    for (int i = 0; i < grid_resolution; ++i) {
      Vector2d z(static_cast<double>(i) / grid_resolution,
                 static_cast<double>(j) / grid_resolution);
      double r = residual(z);
      if (best.size() < keep) {
        best.push_back({z, r});
        std::sort(best.begin(), best.end(),
                  [](const Candidate& a, const Candidate& b) { return a.r < b.r; });
      } else if (r < best.back().r) {
        best.back() = {z, r};
        std::sort(best.begin(), best.end(),
                  [](const Candidate& a, const Candidate& b) { return a.r < b.r; });
      }
    }

  // Compass refinement: derivative-free, robust in the C0 setting.
  auto refine = [&](Candidate c) {
    double step = 0.5 / grid_resolution;
    while (step > 1e-16 && c.r > tolerance * 0.01) {
      bool moved = false;
      for (int d = 0; d < 4; ++d) {
        static const double sx[4] = {1, -1, 0, 0};
        static const double sy[4] = {0, 0, 1, -1};
        Vector2d z = c.z + step * Vector2d(sx[d], sy[d]);
        double r = residual(z);
        if (r < c.r) {
          c = {z, r};
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    return c;
  };

  Candidate overall = best.front();
  for (Candidate& c : best) {
    Candidate r = refine(c);
    if (r.r < overall.r) overall = r;
    if (overall.r < tolerance) break;
  }
  res.point = torus_point(overall.z);
  res.residual = overall.r;
  res.found = overall.r < tolerance;
  return res;
}

}  // namespace rotaset
