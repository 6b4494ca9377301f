#pragma once

#include "rotaset/geometry.hpp"
#include "rotaset/torus_maps.hpp"

#include <cstdint>
#include <vector>

namespace rotaset {

// Finite-time Birkhoff estimate; recomputing with the same evaluation order
// reproduces the vector bit-identically.
struct OrbitEstimate {
  Vector2d base{0, 0};
  long long length = 0;
  Vector2d vector{0, 0};     // (f~^n(z) - z) / n
  double error_radius = 0;   // 2 sup|phi| / n
};

Vector2d birkhoff_vector(const LiftMap& map, const Vector2d& z, long long n);
OrbitEstimate birkhoff_estimate(const LiftMap& map, const Vector2d& z, long long n);

struct LebesgueVector {
  Vector2d value{0, 0};
  double error_bound = 0;  // omega_phi of the sub-cell radius
  int resolution = 0;
};

// Midpoint-rule quadrature of phi over the torus; exact for the trigonometric
// families once the resolution exceeds their frequency content.
LebesgueVector lebesgue_rotation_vector(const LiftMap& map, int resolution);

struct OrbitHullEstimate {
  ConvexRationalPolygon hull;  // hull of Birkhoff vectors (floats lifted exactly)
  double error_radius = 0;
  std::vector<OrbitEstimate> samples;
};

// Hull of Birkhoff vectors from stratified seeded base points: an inner
// estimate of the rotation set up to the reported finite-time radius.
OrbitHullEstimate orbit_hull_estimate(const LiftMap& map, int sample_count, long long n,
                                      std::uint64_t seed);

struct PeriodicOrbitResult {
  bool found = false;
  Vector2d point{0, 0};   // best candidate, torus representative
  double residual = 0;    // |f~^q(z) - z - p| at the candidate
  long long period = 0;
};

// Numerical search for z with f~^q(z) = z + (p1, p2): coarse residual scan on
// a grid followed by derivative-free compass refinement. Absence is a valid
// answer (found = false with the residual floor).
PeriodicOrbitResult find_periodic_orbit(const LiftMap& map, const RationalVec2& target,
                                        int grid_resolution = 256, double tolerance = 1e-9);

}  // namespace rotaset
