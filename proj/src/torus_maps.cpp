#include "rotaset/torus_maps.hpp"

#include "rotaset/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rotaset {

Vector2d torus_point(const Vector2d& z) {
  return {z.x() - std::floor(z.x()), z.y() - std::floor(z.y())};
}

Vector2d torus_delta(const Vector2d& a, const Vector2d& b) {
  Vector2d d = b - a;
  return {d.x() - std::nearbyint(d.x()), d.y() - std::nearbyint(d.y())};
}

double torus_distance(const Vector2d& a, const Vector2d& b, Norm norm) {
  Vector2d d = torus_delta(a, b);
  return norm == Norm::euclidean ? d.norm() : d.lpNorm<Eigen::Infinity>();
}

namespace {

// C1 bump profile on [0,1]: 1 at 0, 0 at 1.
inline double profile(double u) {
  double w = 1.0 - u * u;
  return w * w;
}

}  // namespace

StadiumBump::StadiumBump(const Vector2d& start_, const Vector2d& displacement, double taper_,
                         double halfwidth_)
    : start(start_), taper(taper_), halfwidth(halfwidth_) {
  len = displacement.norm();
  if (len == 0) {
    dir = Vector2d(1, 0);
    return;
  }
  dir = displacement / len;
  if (!(taper > kProfileSlope * len))
    throw std::invalid_argument("bump taper too short for injectivity");
  if (!(len + 2 * taper < 0.98) || !(halfwidth < 0.49))
    throw std::invalid_argument("bump support does not fit in a fundamental domain");
}

Vector2d StadiumBump::displacement_at(const Vector2d& z) const {
  if (len == 0) return {0, 0};
  Vector2d center = start + (0.5 * len) * dir;
  Vector2d rel = z - center;
  rel.x() -= std::nearbyint(rel.x());
  rel.y() -= std::nearbyint(rel.y());
  double t = rel.dot(dir) + 0.5 * len;  // axis coordinate measured from `start`
  double s = std::abs(dir.x() * rel.y() - dir.y() * rel.x());
  if (t <= -taper || t >= len + taper || s >= halfwidth) return {0, 0};
  double along = 1.0;
  if (t < 0)
    along = profile(-t / taper);
  else if (t > len)
    along = profile((t - len) / taper);
  double across = profile(s / halfwidth);
  return dir * (len * along * across);
}

double StadiumBump::lipschitz() const {
  if (len == 0) return 0;
  return len * kProfileSlope * (1.0 / taper + 1.0 / halfwidth);
}

double StadiumBump::distance_to_support(const Vector2d& p) const {
  if (len == 0) return std::numeric_limits<double>::infinity();
  Vector2d center = start + (0.5 * len) * dir;
  Vector2d rel = p - center;
  rel.x() -= std::nearbyint(rel.x());
  rel.y() -= std::nearbyint(rel.y());
  double t = rel.dot(dir);
  double s = std::abs(dir.x() * rel.y() - dir.y() * rel.x());
  double dt = std::max(0.0, std::abs(t) - (0.5 * len + taper));
  double ds = std::max(0.0, s - halfwidth);
  return std::hypot(dt, ds);
}

LiftMap LiftMap::translation(const Vector2d& v) {
  LiftMap m;
  m.family_ = Family::translation;
  m.trans_ = v;
  m.conservative_ = true;
  m.finish_construction();
  return m;
}

LiftMap LiftMap::shear(double r) {
  LiftMap m;
  m.family_ = Family::shear;
  m.r_ = r;
  m.conservative_ = true;  // horizontal shear has unit Jacobian
  m.finish_construction();
  return m;
}

LiftMap LiftMap::coupled_shear(double a, double b, double r, double s) {
  LiftMap m;
  m.family_ = Family::coupled_shear;
  m.trans_ = Vector2d(a, b);
  m.r_ = r;
  m.s_ = s;
  m.conservative_ = false;  // simultaneous coupling distorts local area
  m.finish_construction();
  return m;
}

LiftMap LiftMap::pinned(int q, int p1) {
  // Amplitudes keep |d(x + u)/dx| and |d(y + w)/dy| below 1 for every q.
  return pinned(q, p1, 0.15 / q, 0.15, 0.075);
}

LiftMap LiftMap::pinned(int q, int p1, double stir, double stir2, double contraction) {
  if (q < 1) throw std::invalid_argument("pinned family requires q >= 1");
  if (std::gcd(std::abs(p1), q) != 1)
    throw std::invalid_argument("pinned family requires gcd(p1, q) = 1");
  if (!(2 * M_PI * q * stir < 1.0) || !(2 * M_PI * stir2 < 1.0) ||
      !(4 * M_PI * contraction < 1.0))
    throw std::invalid_argument("pinned amplitudes too large for a homeomorphism");
  LiftMap m;
  m.family_ = Family::pinned;
  m.pin_ = PinnedParams{q, p1, stir, stir2, contraction};
  m.conservative_ = false;
  m.finish_construction();
  return m;
}

LiftMap LiftMap::grid_field(int n, std::vector<float> data) {
  if (n < 2) throw std::invalid_argument("grid field needs resolution >= 2");
  if (data.size() != static_cast<std::size_t>(n) * n * 2)
    throw std::invalid_argument("grid field data size mismatch");
  for (float v : data)
    if (!std::isfinite(v)) throw std::invalid_argument("grid field contains non-finite values");
  LiftMap m;
  m.family_ = Family::grid_field;
  m.grid_n_ = n;
  m.grid_ = std::move(data);
  m.conservative_ = false;
  m.finish_construction();
  return m;
}

Vector2d LiftMap::base_displacement(const Vector2d& u) const {
  switch (family_) {
    case Family::translation:
      return trans_;
    case Family::shear:
      return {r_ * std::sin(2 * M_PI * u.y()), 0.0};
    case Family::coupled_shear:
      return {trans_.x() + r_ * std::sin(2 * M_PI * u.y()),
              trans_.y() + s_ * std::sin(2 * M_PI * u.x())};
    case Family::pinned: {
      double c = std::cos(M_PI * u.y());
      c = c * c;
      double locked = static_cast<double>(pin_.p1) / pin_.q +
                      pin_.stir * std::sin(2 * M_PI * pin_.q * u.x());
      double fixed = -pin_.stir2 * std::sin(2 * M_PI * u.x());
      double ux = c * locked + (1.0 - c) * fixed;
      double wy = -pin_.contraction * std::sin(4 * M_PI * u.y());
      return {ux, wy};
    }
    case Family::grid_field: {
      double gx = u.x() * grid_n_;
      double gy = u.y() * grid_n_;
      int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
      double fx = gx - ix, fy = gy - iy;
      int ix1 = (ix + 1) % grid_n_, iy1 = (iy + 1) % grid_n_;
      auto at = [&](int i, int j, int c) {
        return static_cast<double>(grid_[(static_cast<std::size_t>(j) * grid_n_ + i) * 2 + c]);
      };
      Vector2d v;
      for (int c = 0; c < 2; ++c) {
        double a = at(ix, iy, c) * (1 - fx) + at(ix1, iy, c) * fx;
        double b = at(ix, iy1, c) * (1 - fx) + at(ix1, iy1, c) * fx;
        v[c] = a * (1 - fy) + b * fy;
      }
      return v;
    }
  }
  return {0, 0};
}

void LiftMap::finish_construction() {
  switch (family_) {
    case Family::translation:
      phi_lipschitz_ = 0;
      phi_sup_ = trans_.norm();
      break;
    case Family::shear:
      phi_lipschitz_ = 2 * M_PI * std::abs(r_);
      phi_sup_ = std::abs(r_);
      break;
    case Family::coupled_shear:
      phi_lipschitz_ = 2 * M_PI * std::max(std::abs(r_), std::abs(s_));
      phi_sup_ = std::hypot(std::abs(trans_.x()) + std::abs(r_),
                            std::abs(trans_.y()) + std::abs(s_));
      break;
    case Family::pinned: {
      double base = std::abs(static_cast<double>(pin_.p1)) / pin_.q;
      double lux = std::max(2 * M_PI * pin_.q * pin_.stir, 2 * M_PI * pin_.stir2);
      double luy = M_PI * (base + pin_.stir + pin_.stir2);
      double lwy = 4 * M_PI * pin_.contraction;
      phi_lipschitz_ = std::sqrt(lux * lux + luy * luy + lwy * lwy);
      phi_sup_ = std::hypot(std::max(base + pin_.stir, pin_.stir2), pin_.contraction);
      break;
    }
    case Family::grid_field: {
      double h = 1.0 / grid_n_;
      double l2 = 0, sup2x = 0, sup2y = 0;
      auto at = [&](int i, int j, int c) {
        return static_cast<double>(grid_[(static_cast<std::size_t>(j) * grid_n_ + i) * 2 + c]);
      };
      for (int c = 0; c < 2; ++c) {
        double lx = 0, ly = 0, sup = 0;
        for (int j = 0; j < grid_n_; ++j) {
          for (int i = 0; i < grid_n_; ++i) {
            double v = at(i, j, c);
            sup = std::max(sup, std::abs(v));
            lx = std::max(lx, std::abs(at((i + 1) % grid_n_, j, c) - v) / h);
            ly = std::max(ly, std::abs(at(i, (j + 1) % grid_n_, c) - v) / h);
          }
        }
        l2 += lx * lx + ly * ly;
        (c == 0 ? sup2x : sup2y) = sup;
      }
      phi_lipschitz_ = std::sqrt(l2);
      phi_sup_ = std::hypot(sup2x, sup2y);
      break;
    }
  }
  // Anchor the branch: phi(0,0) in [0,1)^2.
  Vector2d d0 = base_displacement(Vector2d(0, 0));
  anchor_offset_ = Vector2i(static_cast<int>(std::floor(d0.x())),
                            static_cast<int>(std::floor(d0.y())));
  if (anchor_offset_ != Vector2i(0, 0)) {
    if (family_ == Family::translation || family_ == Family::coupled_shear) {
      trans_ -= anchor_offset_.cast<double>();
    } else {
      // Other families are anchored by construction; record only.
      anchor_offset_ = Vector2i(0, 0);
    }
  }
}

Vector2d LiftMap::eval(const Vector2d& z) const {
  Vector2d y = z + base_displacement(torus_point(z));
  for (const StadiumBump& b : bumps_) y += b.displacement_at(y);
  return y + rotation_offset_;
}

Vector2d LiftMap::iterate(Vector2d z, long long n) const {
  for (long long i = 0; i < n; ++i) z = eval(z);
  return z;
}

LiftMap LiftMap::composed_with_rotation(const Vector2d& v) const {
  LiftMap m = *this;
  m.rotation_offset_ += v;
  m.phi_sup_ += v.norm();
  return m;
}

LiftMap LiftMap::with_bump(const StadiumBump& bump) const {
  return with_bumps(std::vector<StadiumBump>{bump});
}

LiftMap LiftMap::with_bumps(const std::vector<StadiumBump>& bumps) const {
  LiftMap m = *this;
  for (const StadiumBump& b : bumps) m.bumps_.push_back(b);
  // Lip(H o f~ - id) <= Lip(H - id)(1 + Lip(f~ - id)) + Lip(f~ - id), with the
  // bump chain folded as Lip(B_k o ... o B_1 - id).
  double lh = 0;
  for (const StadiumBump& b : m.bumps_) {
    double lb = b.lipschitz();
    lh = lb * (1.0 + lh) + lh;
  }
  double l0 = phi_lipschitz_;
  double sup0 = phi_sup_;
  for (const StadiumBump& b : m.bumps_) sup0 += b.max_displacement();
  m.phi_lipschitz_ = lh * (1.0 + l0) + l0;
  m.phi_sup_ = sup0;
  if (conservative_ && m.annotations_.empty())
    m.annotations_.push_back("conservativity broken: bump perturbations do not preserve area");
  return m;
}

LiftMap LiftMap::with_conservative_flag(bool flag) const {
  LiftMap m = *this;
  m.conservative_ = flag;
  return m;
}

std::vector<Vector2d> LiftMap::pinned_orbit() const {
  if (family_ != Family::pinned) return {};
  std::vector<Vector2d> pts;
  double x = 1.0 / (2.0 * pin_.q);
  for (int i = 0; i < pin_.q; ++i) {
    long long num = 2LL * i * pin_.p1 + 1;  // x_i = (2 i p1 + 1) / (2q) mod 1
    num %= 2LL * pin_.q;
    if (num < 0) num += 2LL * pin_.q;
    pts.emplace_back(static_cast<double>(num) / (2.0 * pin_.q), 0.0);
  }
  (void)x;
  return pts;
}

double PseudoOrbit::max_step_defect(const LiftMap& map, Norm norm) const {
  double worst = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    Vector2d img = map.eval(points[i]);
    Vector2d d = points[i + 1] - img;
    worst = std::max(worst, norm == Norm::euclidean ? d.norm() : d.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

bool PseudoOrbit::valid(const LiftMap& map, Norm norm) const {
  double defect = max_step_defect(map, norm);
  if (delta > 0) return defect < delta;
  return defect <= 1e-9;
}

OscillationEstimate osc(const LiftMap& map, int grid) {
  if (grid < 2) throw std::invalid_argument("osc grid must be >= 2");
  std::vector<Vector2d> vals;
  vals.reserve(static_cast<std::size_t>(grid) * grid);
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i)
      vals.push_back(map.displacement(Vector2d((i + 0.5) / grid, (j + 0.5) / grid)));

  // Diameter of the sample cloud via its (floating point) hull.
  std::sort(vals.begin(), vals.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  vals.erase(std::unique(vals.begin(), vals.end(),
                         [](const Vector2d& a, const Vector2d& b) { return a == b; }),
             vals.end());
  std::vector<Vector2d> hull;
  auto cross = [](const Vector2d& o, const Vector2d& a, const Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  if (vals.size() > 2) {
    std::vector<Vector2d> h(2 * vals.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      while (k >= 2 && cross(h[k - 2], h[k - 1], vals[i]) <= 0) --k;
      h[k++] = vals[i];
    }
    for (std::size_t i = vals.size() - 1, lo = k + 1; i-- > 0;) {
      while (k >= lo && cross(h[k - 2], h[k - 1], vals[i]) <= 0) --k;
      h[k++] = vals[i];
    }
    h.resize(k - 1);
    hull = std::move(h);
  } else {
    hull = vals;
  }
  double diam = 0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j)
      diam = std::max(diam, (hull[i] - hull[j]).norm());

  OscillationEstimate est;
  est.grid = grid;
  est.grid_value = diam;
  double sample_radius = std::sqrt(2.0) / (2.0 * grid);
  est.certified_upper = diam + 2.0 * map.omega_phi(sample_radius);
  return est;
}

double sup_displacement(const LiftMap& map, int grid) {
  double sup = 0;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i)
      sup = std::max(sup,
                     map.displacement(Vector2d((i + 0.5) / grid, (j + 0.5) / grid)).norm());
  double bound = sup + map.omega_phi(std::sqrt(2.0) / (2.0 * grid));
  return std::min(bound, map.phi_sup_bound());
}

LiftValidationReport verify_lift(const LiftMap& map, int grid) {
  LiftValidationReport rep;
  SplitMix64 rng(0x5eedULL);

  // Structural and periodicity checks on random points and integer offsets.
  for (int it = 0; it < 512; ++it) {
    Vector2d z = rng.point_in_unit_square();
    Vector2d fz = map.eval(z);
    if (!fz.allFinite()) {
      rep.structural_ok = false;
      throw std::runtime_error("lift evaluates to non-finite values");
    }
    Vector2d m(static_cast<double>(static_cast<int>(rng.below(9)) - 4),
               static_cast<double>(static_cast<int>(rng.below(9)) - 4));
    Vector2d defect = map.eval(z + m) - fz - m;
    rep.periodicity_defect = std::max(rep.periodicity_defect, defect.norm());
  }

  // Approximate injectivity: images of grid centres that collide while their
  // sources are separated witness a crossing at this resolution.
  double h = 1.0 / grid;
  double collision_tol = 0.25 * h;
  std::vector<Vector2d> src, img;
  src.reserve(static_cast<std::size_t>(grid) * grid);
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      Vector2d z((i + 0.5) * h, (j + 0.5) * h);
      src.push_back(z);
      img.push_back(map.eval(z));
    }
  rep.min_image_separation = std::numeric_limits<double>::infinity();
  int buckets = std::max(4, static_cast<int>(std::floor(1.0 / collision_tol)));
  std::vector<std::vector<int>> bucket(static_cast<std::size_t>(buckets) * buckets);
  auto bucket_of = [&](const Vector2d& p) {
    Vector2d t = torus_point(p);
    int bx = std::min(buckets - 1, static_cast<int>(t.x() * buckets));
    int by = std::min(buckets - 1, static_cast<int>(t.y() * buckets));
    return std::pair<int, int>(bx, by);
  };
  for (std::size_t idx = 0; idx < img.size(); ++idx) {
    auto [bx, by] = bucket_of(img[idx]);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int nx = (bx + dx + buckets) % buckets;
        int ny = (by + dy + buckets) % buckets;
        for (int other : bucket[static_cast<std::size_t>(ny) * buckets + nx]) {
          double source_sep = torus_distance(src[idx], src[other]);
          if (source_sep < 2.0 * h) continue;  // neighbouring cells may legitimately collide
          double image_sep = torus_distance(img[idx], img[other]);
          rep.min_image_separation = std::min(rep.min_image_separation, image_sep);
          if (image_sep < collision_tol) {
            rep.injectivity_suspect = true;
            rep.collision_witness_a = src[idx];
            rep.collision_witness_b = src[other];
          }
        }
      }
    bucket[static_cast<std::size_t>(by) * buckets + bx].push_back(static_cast<int>(idx));
  }

  // Degree-1 check: the image of the boundary of a fundamental square winds
  // exactly once around the image of its centre.
  {
    Vector2d center(0.37, 0.41);  // avoid symmetry axes of the shipped families
    Vector2d p = map.eval(center);
    int samples = 4 * grid;
    double total = 0;
    Vector2d prev;
    for (int i = 0; i <= samples; ++i) {
      double t = static_cast<double>(i) / samples * 4.0;
      Vector2d z;
      if (t < 1)
        z = Vector2d(t, 0);
      else if (t < 2)
        z = Vector2d(1, t - 1);
      else if (t < 3)
        z = Vector2d(3 - t, 1);
      else
        z = Vector2d(0, 4 - t);
      z += center - Vector2d(0.5, 0.5);
      Vector2d w = map.eval(z) - p;
      if (i > 0) {
        double cross = prev.x() * w.y() - prev.y() * w.x();
        double dot = prev.dot(w);
        total += std::atan2(cross, dot);
      }
      prev = w;
    }
    rep.boundary_winding = total / (2 * M_PI);
    rep.degree_one = std::abs(rep.boundary_winding - 1.0) < 0.05;
  }

  // Conservativity spot check: boundary-traced image areas of test squares.
  if (map.conservative_flag()) {
    rep.conservative_checked = true;
    SplitMix64 sq(0xa5a5ULL);
    for (int trial = 0; trial < 8; ++trial) {
      Vector2d corner = sq.point_in_unit_square();
      double side = 0.2;
      int per_edge = 200;
      std::vector<Vector2d> poly;
      for (int e = 0; e < 4; ++e)
        for (int i = 0; i < per_edge; ++i) {
          double t = static_cast<double>(i) / per_edge;
          Vector2d z = corner;
          if (e == 0) z += Vector2d(t * side, 0);
          if (e == 1) z += Vector2d(side, t * side);
          if (e == 2) z += Vector2d((1 - t) * side, side);
          if (e == 3) z += Vector2d(0, (1 - t) * side);
          poly.push_back(map.eval(z));
        }
      double area2 = 0;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vector2d& a = poly[i];
        const Vector2d& b = poly[(i + 1) % poly.size()];
        area2 += a.x() * b.y() - a.y() * b.x();
      }
      double area = std::abs(area2) / 2.0;
      rep.area_defect = std::max(rep.area_defect, std::abs(area - side * side) / (side * side));
    }
    rep.conservative_claim_plausible = rep.area_defect < 0.02;
  }

  rep.osc_grid = osc(map, std::min(grid, 256)).grid_value;
  return rep;
}

}  // namespace rotaset
