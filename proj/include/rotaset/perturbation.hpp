#pragma once

#include "rotaset/estimation.hpp"
#include "rotaset/geometry.hpp"
#include "rotaset/torus_maps.hpp"
#include "rotaset/transition_graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rotaset {

// Finite relocation instruction set (E, sigma, epsilon): move the f-image of
// each source exactly onto its target, with d(f(x), sigma(x)) < epsilon and
// sigma injective. keep_fixed lists torus points the relocation homeomorphism
// must not touch (the untouched part of an orbit being closed).
struct PerturbationPatch {
  std::vector<Vector2d> sources;  // E, torus points
  std::vector<Vector2d> targets;  // sigma(E), torus points
  double epsilon = 0;
  std::vector<Vector2d> keep_fixed;
  double support_halfwidth = 0.06;  // transverse cap; shrunk if supports collide
};

// C0 perturbation lemma, constructively: g = H o f where H is a composition
// of stadium bumps translating each f(x) to sigma(x) along the shortest torus
// segment, in hops short enough to keep every bump injective. Guarantees
// g(x) = sigma(x) exactly (to round-off), d_C0(f, g) < epsilon, and g a
// homeomorphism. Throws "patch infeasible" when supports cannot be separated.
LiftMap c0_move(const LiftMap& map, const PerturbationPatch& patch);

// Measured sup-distance between two lifts on a dense grid.
double c0_distance(const LiftMap& a, const LiftMap& b, int grid = 512);

struct ClosePair {
  std::size_t i = 0, j = 0;  // i < j
  double distance = 0;       // toroidal
};

// Closest pair among q torus points; the pigeonhole argument guarantees
// distance < 2/sqrt(pi q).
ClosePair find_close_pair(const std::vector<Vector2d>& points);

// v0 = u0/k and v1 = (q v - u0)/(q - k), exact; checks the defining identity
// preconditions and that neither equals v (mutual coprimality of p1, p2, q).
std::pair<RationalVec2, RationalVec2> split_vectors(long long q, const RationalVec2& v,
                                                    long long k, const Vector2i& u0);

struct DestabilizeResult {
  LiftMap perturbed;
  RationalVec2 new_vector;
  double perturbation_size = 0;  // measured d_C0(f, g)
  double budget = 0;             // 2/sqrt(pi q)
  long long k = 0;
  Vector2i u0{0, 0};
  RationalVec2 v0, v1;
  std::string chosen;  // "v0" or "v1"
  std::vector<Vector2d> source_orbit;  // the periodic orbit of f used (torus)
  PseudoOrbit certified_orbit;         // exact periodic orbit of the perturbed lift
  double orbit_residual = 0;
  Vector2i winding{0, 0};
};

// Destabilizing perturbation at a rational extremal point (p1/q, p2/q), q > 1:
// realize the vertex by a periodic orbit, locate a close pair on it, split the
// rotation vector, and close whichever piece escapes P with a C0 patch of size
// below 2/sqrt(pi q). The returned vector is certified by an exact periodic
// orbit of the perturbed map.
DestabilizeResult destabilize(const LiftMap& map, const ConvexRationalPolygon& P,
                              const RationalVec2& vertex, int search_grid = 256);

enum class StabilityVerdict { evidence_stable, unstable, inconclusive };

struct ProbeOptions {
  int orbit_samples = 48;
  long long orbit_length = 20000;
  std::uint64_t seed = 1;
  bool attempt_destabilize = true;
};

struct StabilityProbe {
  StabilityVerdict verdict = StabilityVerdict::inconclusive;
  std::string reason;
  double delta = 0;
  int grid = 0;
  double tolerance = 0;  // 3 (r_h + omega(r_h))
  PseudoRotationPolygon inner, outer;
  OrbitHullEstimate orbit;
  ConvexRationalPolygon consensus;  // inner polygon snapped to the denominator budget
  bool consensus_ok = false;
  long long denominator_bound = 0;  // max_vertex_denominator(delta)
  double hausdorff_inner_outer = 0;
  double hausdorff_outer_orbit = 0;
};

// Stability probe at tolerance delta: compares inner/outer pseudo-rotation
// polygons at delta/2 with the orbit hull. evidence_stable means all three
// agree within the discretization tolerance and the polygon snaps onto the
// denominator budget 4/(pi delta^2); unstable means the pseudo-rotation set
// provably exceeds orbit estimates (or a destabilizing perturbation smaller
// than delta was found); otherwise inconclusive.
StabilityProbe probe_stability(const LiftMap& map, double delta, int grid_n,
                               const ProbeOptions& opts = {});

}  // namespace rotaset
