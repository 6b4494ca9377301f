#include "rotaset/deviations.hpp"

#include "rotaset/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rotaset {

double deviation_constant(double osc_value, double eps, DeviationKind kind) {
  if (!(eps > 0 && eps < 1))
    throw std::invalid_argument("paper bound requires eps < 1 (and eps > 0)");
  if (!(osc_value >= 0)) throw std::invalid_argument("osc must be nonnegative");
  double base = M_PI * eps * eps;
  if (kind == DeviationKind::pseudo) return 16.0 / base * (osc_value + 2.0) + eps;
  return 4.0 * (osc_value + 1.0) / base + eps;
}

namespace {

// Floating-point distance from p to the polygon scaled by n; the trace runs
// for up to 1e7 steps, so this stays off the exact-rational path.
double dist_to_scaled(const std::vector<Vector2d>& verts, double n, const Vector2d& p,
                      Norm norm) {
  auto seg_dist = [&](const Vector2d& a, const Vector2d& b) {
    Vector2d ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    Vector2d d = p - (a + t * ab);
    return norm == Norm::euclidean ? d.norm() : d.lpNorm<Eigen::Infinity>();
  };
  if (verts.size() == 1) {
    Vector2d d = p - n * verts[0];
    return norm == Norm::euclidean ? d.norm() : d.lpNorm<Eigen::Infinity>();
  }
  // inside test (CCW strict hull)
  if (verts.size() >= 3) {
    bool inside = true;
    for (std::size_t i = 0; i < verts.size() && inside; ++i) {
      Vector2d a = n * verts[i], b = n * verts[(i + 1) % verts.size()];
      if ((b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x()) < 0)
        inside = false;
    }
    if (inside) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    std::size_t j = (i + 1) % verts.size();
    if (verts.size() == 2 && i == 1) break;
    best = std::min(best, seg_dist(n * verts[i], n * verts[j]));
  }
  return best;
}

}  // namespace

DeviationReport max_deviation(const LiftMap& map, const ConvexRationalPolygon& P,
                              const Vector2d& x0, const DeviationOptions& opts) {
  if (opts.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (opts.mode != NoiseMode::none && !(opts.delta > 0))
    throw std::invalid_argument("noisy modes need delta > 0");

  std::vector<Vector2d> verts;
  verts.reserve(P.size());
  for (const RationalVec2& v : P.vertices()) verts.push_back(to_double(v));

  DeviationReport rep;
  rep.n_max = opts.n_max;
  rep.bound_C = opts.bound_C;
  rep.kind = (opts.mode == NoiseMode::none) ? DeviationKind::orbit : DeviationKind::pseudo;

  SplitMix64 rng = SplitMix64::stream(opts.seed, 0);
  Vector2d locked = opts.locked_direction;
  if (opts.mode == NoiseMode::direction_locked) {
    double nrm = locked.norm();
    if (!(nrm > 0)) throw std::invalid_argument("locked direction must be nonzero");
    locked /= nrm;
  }
  const double amp = opts.delta * (1.0 - 1e-9);  // strict: noise norm < delta

  Vector2d x = x0;
  long long next_checkpoint = 1;
  for (long long n = 1; n <= opts.n_max; ++n) {
    x = map.eval(x);
    switch (opts.mode) {
      case NoiseMode::none:
        break;
      case NoiseMode::uniform:
        x += rng.point_in_disk(amp * (1.0 - 1e-9));
        break;
      case NoiseMode::boundary_biased:
        x += amp * rng.direction();
        break;
      case NoiseMode::direction_locked:
        x += amp * locked;
        break;
    }
    double dev = dist_to_scaled(verts, static_cast<double>(n), x - x0, opts.norm);
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.argmax_n = n;
    }
    if (rep.first_violation_n < 0 && opts.bound_C > 0 && dev > opts.bound_C)
      rep.first_violation_n = n;
    if (n == next_checkpoint || n == opts.n_max) {
      rep.trace.emplace_back(n, dev);
      next_checkpoint = std::max(n + 1, static_cast<long long>(std::ceil(n * 1.25)));
    }
  }
  rep.violated = opts.bound_C > 0 && rep.max_deviation > opts.bound_C;
  return rep;
}

}  // namespace rotaset
