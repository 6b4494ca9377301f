#include "rotaset/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rotaset {

namespace {

constexpr double kTaperFactor = 1.75;  // > StadiumBump::kProfileSlope, injectivity margin
constexpr double kMaxHop = 0.20;       // keeps each stadium inside a fundamental domain

// Chain of collinear stadium bumps moving a to b (nearest representatives).
std::vector<StadiumBump> relocation_chain(const Vector2d& a, const Vector2d& b,
                                          double halfwidth, int min_hops) {
  Vector2d d = torus_delta(a, b);
  double len = d.norm();
  std::vector<StadiumBump> chain;
  if (len == 0) return chain;
  int hops = std::max(min_hops, static_cast<int>(std::ceil(len / kMaxHop)));
  Vector2d hop = d / hops;
  double taper = kTaperFactor * hop.norm();
  for (int t = 0; t < hops; ++t)
    chain.emplace_back(a + static_cast<double>(t) * hop, hop, taper, halfwidth);
  return chain;
}

double chain_clearance(const std::vector<StadiumBump>& chain, const Vector2d& p) {
  double c = std::numeric_limits<double>::infinity();
  for (const StadiumBump& b : chain) c = std::min(c, b.distance_to_support(p));
  return c;
}

}  // namespace

LiftMap c0_move(const LiftMap& map, const PerturbationPatch& patch) {
  std::size_t m = patch.sources.size();
  if (m == 0) throw std::invalid_argument("empty perturbation patch");
  if (patch.targets.size() != m) throw std::invalid_argument("patch source/target size mismatch");
  if (!(patch.epsilon > 0)) throw std::invalid_argument("patch epsilon must be positive");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (torus_distance(patch.targets[i], patch.targets[j]) < 1e-12)
        throw std::invalid_argument("sigma is not injective");

  // Relocation endpoints: a_i = f(x_i), b_i = nearest representative of the
  // target. The whole chain moves points by at most d(a_i, b_i) < epsilon.
  std::vector<Vector2d> a(m), b(m);
  std::vector<double> len(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = map.eval(torus_point(patch.sources[i]));
    Vector2d d = torus_delta(a[i], torus_point(patch.targets[i]));
    len[i] = d.norm();
    if (!(len[i] < patch.epsilon))
      throw std::invalid_argument("patch infeasible at this epsilon: relocation exceeds budget");
    b[i] = a[i] + d;
  }

  // Build chains, shrinking the transverse width and shortening tapers until
  // the supports are pairwise disjoint and clear of every protected point.
  double halfwidth = patch.support_halfwidth;
  int min_hops = 1;
  std::vector<std::vector<StadiumBump>> chains(m);
  const double margin = 1e-7;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 24)
      throw std::invalid_argument("patch infeasible at this epsilon: supports cannot be separated");
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      chains[i] = relocation_chain(a[i], b[i], halfwidth, min_hops);
      if (chains[i].empty()) continue;
      // other patch endpoints must stay fixed by this chain
      for (std::size_t j = 0; j < m && ok; ++j) {
        if (j == i) continue;
        if (chain_clearance(chains[i], a[j]) <= margin) ok = false;
        if (chain_clearance(chains[i], b[j]) <= margin) ok = false;
      }
      for (const Vector2d& p : patch.keep_fixed)
        if (chain_clearance(chains[i], p) <= margin) {
          ok = false;
          break;
        }
    }
    // supports of distinct chains must be pairwise disjoint
    for (std::size_t i = 0; i < m && ok; ++i)
      for (std::size_t j = i + 1; j < m && ok; ++j)
        for (const StadiumBump& bi : chains[i]) {
          // conservative separation test on bump axis samples
          for (const StadiumBump& bj : chains[j]) {
            double gap = bi.distance_to_support(bj.start + 0.5 * bj.len * bj.dir) -
                         (bj.len * 0.5 + bj.taper + bj.halfwidth);
            if (gap <= margin) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
        }
    if (ok) break;
    if (attempt % 2 == 0 && halfwidth > 1e-4)
      halfwidth *= 0.5;
    else
      min_hops += 1;  // shorter hops shorten the tapered overshoot zones
  }

  std::vector<StadiumBump> bumps;
  for (auto& c : chains)
    for (StadiumBump& bump : c) bumps.push_back(bump);
  LiftMap moved = map.with_bumps(bumps);

  for (std::size_t i = 0; i < m; ++i) {
    double err = torus_distance(moved.eval(torus_point(patch.sources[i])),
                                torus_point(patch.targets[i]));
    if (err > 1e-10) throw std::logic_error("c0_move post-check failed: g(x) != sigma(x)");
  }
  return moved;
}

double c0_distance(const LiftMap& a, const LiftMap& b, int grid) {
  double sup = 0;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      Vector2d z((i + 0.5) / grid, (j + 0.5) / grid);
      sup = std::max(sup, (a.eval(z) - b.eval(z)).norm());
    }
  return sup;
}

ClosePair find_close_pair(const std::vector<Vector2d>& points) {
  if (points.size() < 2) throw std::invalid_argument("close pair needs at least two points");
  ClosePair best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double d = torus_distance(points[i], points[j]);
      if (d < best.distance) best = {i, j, d};
    }
  return best;
}

std::pair<RationalVec2, RationalVec2> split_vectors(long long q, const RationalVec2& v,
                                                    long long k, const Vector2i& u0) {
  if (q <= 1) throw std::invalid_argument("split requires q > 1");
  if (k < 1 || k > q - 1) throw std::invalid_argument("k out of range");
  ReducedVector rv = reduce_to_common_denominator(v);
  if (rv.q != q) throw std::invalid_argument("vertex is not a denominator-q rational");
  if (gcd(gcd(abs(rv.p1), abs(rv.p2)), BigInt(q)) != 1)
    throw std::invalid_argument("p1, p2, q must be mutually coprime");

  RationalVec2 v0, v1;
  v0 << Rational(BigInt(u0.x()), BigInt(k)), Rational(BigInt(u0.y()), BigInt(k));
  v1 << Rational(rv.p1 - u0.x(), BigInt(q - k)), Rational(rv.p2 - u0.y(), BigInt(q - k));
  if (v0 == v || v1 == v)
    throw std::invalid_argument("coprimality violated: split vector equals the vertex");
  return {v0, v1};
}

DestabilizeResult destabilize(const LiftMap& map, const ConvexRationalPolygon& P,
                              const RationalVec2& vertex, int search_grid) {
  ReducedVector rv = reduce_to_common_denominator(vertex);
  if (rv.q <= 1)
    throw std::invalid_argument("destabilize requires an extremal vertex with denominator q > 1");
  long long q = rv.q.convert_to<long long>();

  bool is_vertex = false;
  for (const RationalVec2& w : P.vertices())
    if (w == vertex) is_vertex = true;
  if (!is_vertex) throw std::invalid_argument("vertex is not an extremal point of P");

  DestabilizeResult out;
  out.budget = 2.0 / std::sqrt(M_PI * static_cast<double>(q));

  PeriodicOrbitResult po = find_periodic_orbit(map, vertex, search_grid);
  if (!po.found)
    throw std::runtime_error("realization unavailable: no periodic orbit found (min residual " +
                             std::to_string(po.residual) + ")");

  // Lift orbit and re-index so the close pair starts the orbit.
  std::vector<Vector2d> lifted(q);
  lifted[0] = po.point;
  for (long long t = 1; t < q; ++t) lifted[t] = map.eval(lifted[t - 1]);
  std::vector<Vector2d> torus_pts(q);
  for (long long t = 0; t < q; ++t) torus_pts[t] = torus_point(lifted[t]);
  out.source_orbit = torus_pts;

  ClosePair pair = find_close_pair(torus_pts);
  long long s = static_cast<long long>(pair.i);
  out.k = static_cast<long long>(pair.j) - s;

  auto orbit_pt = [&](long long t) { return torus_pts[(s + t) % q]; };

  // u0: integer vector with d(f~^k(x~), x~ + u0) < delta, from the lift.
  Vector2d diff = lifted[pair.j] - lifted[s];
  out.u0 = Vector2i(static_cast<int>(std::nearbyint(diff.x())),
                    static_cast<int>(std::nearbyint(diff.y())));

  auto [v0, v1] = split_vectors(q, vertex, out.k, out.u0);
  out.v0 = v0;
  out.v1 = v1;

  bool in0 = P.contains(v0), in1 = P.contains(v1);
  if (in0 && in1)
    throw std::runtime_error("estimate P too large: both split vectors lie inside P");
  bool pick0;
  if (!in0 && !in1) {
    // both escape; prefer the stronger certificate
    pick0 = dist2_point_polygon(v0, P) >= dist2_point_polygon(v1, P);
  } else {
    pick0 = !in0;
  }
  out.chosen = pick0 ? "v0" : "v1";
  out.new_vector = pick0 ? v0 : v1;

  // Closing patch per the proof: closing the first k steps realizes v0 by
  // relocating the image of f^{k-1}(x); closing the complementary q-k steps
  // realizes v1 by relocating the image of f^{q-1}(x).
  PerturbationPatch patch;
  patch.epsilon = out.budget;
  long long cycle_len;
  Vector2d start_rep;
  if (pick0) {
    patch.sources = {orbit_pt(out.k - 1)};
    patch.targets = {orbit_pt(0)};
    for (long long t = 1; t <= out.k - 1; ++t) patch.keep_fixed.push_back(orbit_pt(t));
    cycle_len = out.k;
    start_rep = torus_point(lifted[s]);
    out.winding = out.u0;
  } else {
    patch.sources = {orbit_pt(q - 1)};
    patch.targets = {orbit_pt(out.k)};
    for (long long t = out.k + 1; t <= q - 1; ++t) patch.keep_fixed.push_back(orbit_pt(t));
    cycle_len = q - out.k;
    start_rep = orbit_pt(out.k);
    out.winding = Vector2i(static_cast<int>(rv.p1.convert_to<long long>()) - out.u0.x(),
                           static_cast<int>(rv.p2.convert_to<long long>()) - out.u0.y());
  }

  out.perturbed = c0_move(map, patch);
  out.perturbation_size = c0_distance(map, out.perturbed, 512);
  if (!(out.perturbation_size < out.budget))
    throw std::logic_error("perturbation exceeded the 2/sqrt(pi q) budget");

  // Certify the new periodic orbit of the perturbed lift by direct iteration.
  PseudoOrbit orbit;
  orbit.delta = 0;
  Vector2d z = start_rep;
  orbit.points.push_back(z);
  for (long long t = 0; t < cycle_len; ++t) {
    z = out.perturbed.eval(z);
    orbit.points.push_back(z);
  }
  Vector2d expected = start_rep + out.winding.cast<double>();
  out.orbit_residual = (z - expected).norm();
  if (!(out.orbit_residual < 1e-9))
    throw std::logic_error("perturbed orbit failed certification at 1e-9");
  out.certified_orbit = orbit;
  return out;
}

StabilityProbe probe_stability(const LiftMap& map, double delta, int grid_n,
                               const ProbeOptions& opts) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  double h = 1.0 / grid_n;
  if (h > delta / 2.0) throw std::invalid_argument("grid too coarse: requires h <= delta/2");

  StabilityProbe probe;
  probe.delta = delta;
  probe.grid = grid_n;
  double r_h = h * std::sqrt(2.0) / 2.0;
  probe.tolerance = 3.0 * (r_h + map.omega(r_h));
  probe.denominator_bound = max_vertex_denominator(delta);

  DisplacementGraph g_in = build_graph(map, grid_n, delta / 2.0, GraphMode::inner);
  probe.inner = pseudo_rotation_polygon(g_in);
  DisplacementGraph g_out = build_graph(map, grid_n, delta / 2.0, GraphMode::outer);
  probe.outer = pseudo_rotation_polygon(g_out);
  probe.orbit = orbit_hull_estimate(map, opts.orbit_samples, opts.orbit_length, opts.seed);

  probe.hausdorff_inner_outer = hausdorff(probe.inner.polygon, probe.outer.polygon);
  probe.hausdorff_outer_orbit = hausdorff(probe.outer.polygon, probe.orbit.hull);

  // Consensus polygon: inner vertices snapped onto the denominator budget a
  // delta-upper-stable rotation set must satisfy.
  {
    BigInt bound(probe.denominator_bound > 0 ? probe.denominator_bound : 1);
    std::vector<RationalVec2> snapped;
    for (const RationalVec2& v : probe.inner.polygon.vertices()) {
      RationalVec2 s;
      s << bounded_denominator_round(v.x(), bound), bounded_denominator_round(v.y(), bound);
      snapped.push_back(s);
    }
    probe.consensus = ConvexRationalPolygon::hull(snapped);
    probe.consensus_ok =
        probe.denominator_bound >= 1 &&
        hausdorff(probe.consensus, probe.inner.polygon) <= probe.tolerance &&
        hausdorff(probe.consensus, probe.outer.polygon) <= probe.tolerance;
  }

  double orbit_slack = probe.tolerance + probe.orbit.error_radius;
  bool polygons_certified = probe.inner.certified && probe.outer.certified;

  if (probe.hausdorff_inner_outer <= probe.tolerance &&
      probe.hausdorff_outer_orbit <= orbit_slack && probe.consensus_ok && polygons_certified) {
    probe.verdict = StabilityVerdict::evidence_stable;
    probe.reason = "inner, outer and orbit estimates agree within discretization tolerance";
  } else if (probe.hausdorff_outer_orbit > 2.0 * orbit_slack) {
    probe.verdict = StabilityVerdict::unstable;
    probe.reason = "outer pseudo-rotation polygon exceeds orbit estimates beyond finite-time error";
  } else {
    probe.verdict = StabilityVerdict::inconclusive;
    probe.reason = "estimates neither agree within tolerance nor separate decisively";
  }

  // Constructive refutation: a vertex with denominator above the budget that
  // destabilize escapes with a perturbation below delta contradicts
  // delta-upper-stability outright.
  if (opts.attempt_destabilize && probe.verdict != StabilityVerdict::unstable &&
      probe.consensus_ok) {
    for (const RationalVec2& v : probe.consensus.vertices()) {
      ReducedVector rv = reduce_to_common_denominator(v);
      if (rv.q <= probe.denominator_bound || rv.q <= 1) continue;
      try {
        DestabilizeResult d = destabilize(map, probe.consensus, v);
        if (d.perturbation_size < delta) {
          probe.verdict = StabilityVerdict::unstable;
          probe.reason = "destabilize escaped vertex " + to_string(v.x()) + "," +
                         to_string(v.y()) + " with perturbation below delta";
          break;
        }
      } catch (const std::exception&) {
        // no realization or no escape: consistent with stability
      }
    }
  }
  return probe;
}

}  // namespace rotaset
