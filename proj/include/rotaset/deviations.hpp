#pragma once

#include "rotaset/geometry.hpp"
#include "rotaset/torus_maps.hpp"

#include <cstdint>
#include <vector>

namespace rotaset {

enum class DeviationKind { orbit, pseudo };

// Explicit deviation-bound constants:
//   pseudo: 16/(pi eps^2) (osc + 2) + eps   for eps/2-pseudo-orbits,
//   orbit:   4 (osc + 1)/(pi eps^2) + eps   for true orbits,
// valid for 0 < eps < 1. Throws outside that range.
double deviation_constant(double osc_value, double eps, DeviationKind kind);

enum class NoiseMode { none, uniform, boundary_biased, direction_locked };

struct DeviationOptions {
  long long n_max = 1;
  double delta = 0;  // per-step noise budget; 0 with mode none is a true orbit
  NoiseMode mode = NoiseMode::none;
  Vector2d locked_direction{1, 0};  // for direction_locked
  std::uint64_t seed = 1;
  double bound_C = 0;  // constant the trace is checked against
  Norm norm = Norm::euclidean;
};

struct DeviationReport {
  long long n_max = 0;
  double max_deviation = 0;
  long long argmax_n = 0;
  double bound_C = 0;
  DeviationKind kind = DeviationKind::orbit;
  bool violated = false;            // max_deviation > bound_C
  long long first_violation_n = -1;  // earliest n with deviation > bound_C
  std::vector<std::pair<long long, double>> trace;  // log-spaced checkpoints
};

// Runs the (pseudo-)orbit from x0 and measures d(x~_n - x~_0, n P) per step,
// storing a sparse trace plus the running maximum. Noise is seeded and
// strictly below delta; direction_locked is the adversarial worst case.
DeviationReport max_deviation(const LiftMap& map, const ConvexRationalPolygon& P,
                              const Vector2d& x0, const DeviationOptions& opts);

}  // namespace rotaset
