#include "rotaset/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rotaset {

namespace {

bool lex_less(const RationalVec2& a, const RationalVec2& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

Rational dist2_point_segment(const RationalVec2& p, const RationalVec2& a,
                             const RationalVec2& b) {
  RationalVec2 ab = b - a;
  Rational len2 = ab.dot(ab);
  if (len2 == 0) {
    RationalVec2 d = p - a;
    return d.dot(d);
  }
  Rational t = (p - a).dot(ab) / len2;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  RationalVec2 c = a + (ab * t).eval();
  RationalVec2 d = p - c;
  return d.dot(d);
}

}  // namespace

ConvexRationalPolygon ConvexRationalPolygon::hull(const std::vector<RationalVec2>& points) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  std::vector<RationalVec2> pts = points;
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const RationalVec2& a, const RationalVec2& b) { return a == b; }),
            pts.end());

  ConvexRationalPolygon poly;
  if (pts.size() == 1) {
    poly.verts_ = pts;
    return poly;
  }

  // Monotone chain with strict turns: collinear intermediate points are
  // dropped, which keeps the vertex list strictly convex.
  std::vector<RationalVec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);  // last point equals the first

  if (h.size() == 2 && h[0] == h[1]) h.resize(1);
  poly.verts_ = std::move(h);
  return poly;
}

ConvexRationalPolygon ConvexRationalPolygon::from_vertices(
    const std::vector<RationalVec2>& vertices) {
  ConvexRationalPolygon h = hull(vertices);
  if (h.verts_ != vertices)
    throw std::invalid_argument("vertex list is not a canonical strictly convex CCW polygon");
  return h;
}

Rational ConvexRationalPolygon::doubled_area() const {
  if (verts_.size() < 3) return Rational(0);
  Rational a(0);
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const RationalVec2& p = verts_[i];
    const RationalVec2& q = verts_[(i + 1) % verts_.size()];
    a += cross2(p, q);
  }
  return a;
}

bool ConvexRationalPolygon::contains(const RationalVec2& p) const {
  if (verts_.empty()) return false;
  if (verts_.size() == 1) return p == verts_[0];
  if (verts_.size() == 2) {
    const RationalVec2& a = verts_[0];
    const RationalVec2& b = verts_[1];
    if (cross2(b - a, p - a) != 0) return false;
    RationalVec2 ab = b - a;
    Rational t = (p - a).dot(ab);
    return t >= 0 && t <= ab.dot(ab);
  }
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const RationalVec2& a = verts_[i];
    const RationalVec2& b = verts_[(i + 1) % verts_.size()];
    if (cross2(b - a, p - a) < 0) return false;
  }
  return true;
}

bool ConvexRationalPolygon::contains(const ConvexRationalPolygon& other) const {
  for (const RationalVec2& v : other.verts_)
    if (!contains(v)) return false;
  return true;
}

ConvexRationalPolygon::SupportResult ConvexRationalPolygon::support_exact(
    const RationalVec2& direction) const {
  if (verts_.empty()) throw std::invalid_argument("support of empty polygon");
  if (direction.x() == 0 && direction.y() == 0)
    throw std::invalid_argument("support direction must be nonzero");
  SupportResult res;
  Rational best;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Rational d = verts_[i].dot(direction);
    if (res.argmax.empty() || d > best) {
      best = d;
      res.argmax.assign(1, static_cast<int>(i));
    } else if (d == best) {
      res.argmax.push_back(static_cast<int>(i));
    }
  }
  res.exact_value = best;
  res.value = to_double(best);
  return res;
}

ConvexRationalPolygon::SupportResult ConvexRationalPolygon::support(
    const Vector2d& direction) const {
  return support_exact(exact(direction));
}

ConvexRationalPolygon ConvexRationalPolygon::scaled(const Rational& factor) const {
  std::vector<RationalVec2> v;
  v.reserve(verts_.size());
  for (const RationalVec2& p : verts_) v.push_back((p * factor).eval());
  return hull(v);  // factor 0 or negative collapses/reflects; re-hull restores invariants
}

ConvexRationalPolygon ConvexRationalPolygon::translated(const RationalVec2& offset) const {
  std::vector<RationalVec2> v;
  v.reserve(verts_.size());
  for (const RationalVec2& p : verts_) v.push_back((p + offset).eval());
  ConvexRationalPolygon poly;
  poly.verts_ = std::move(v);
  return poly;
}

Rational dist2_point_polygon(const RationalVec2& p, const ConvexRationalPolygon& P) {
  if (P.empty()) throw std::invalid_argument("distance to empty polygon");
  if (P.contains(p)) return Rational(0);
  const auto& v = P.vertices();
  if (v.size() == 1) {
    RationalVec2 d = p - v[0];
    return d.dot(d);
  }
  Rational best = dist2_point_segment(p, v[0], v[1]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    Rational d = dist2_point_segment(p, v[i], v[(i + 1) % v.size()]);
    if (d < best) best = d;
  }
  return best;
}

Rational dist2_point_scaled_polygon(const RationalVec2& v, long long n,
                                    const ConvexRationalPolygon& P) {
  if (n < 1) throw std::invalid_argument("dilation factor must be >= 1");
  return dist2_point_polygon(v, P.scaled(Rational(n)));
}

double dist_point_scaled_polygon(const Vector2d& v, long long n,
                                 const ConvexRationalPolygon& P) {
  return std::sqrt(to_double(dist2_point_scaled_polygon(exact(v), n, P)));
}

double dist_point_polygon_sup(const Vector2d& v, const ConvexRationalPolygon& P) {
  if (P.empty()) throw std::invalid_argument("distance to empty polygon");
  if (P.contains(exact(v))) return 0.0;
  const auto& verts = P.vertices();
  auto seg_dist = [&](const Vector2d& a, const Vector2d& b) {
    // min over t in [0,1] of max(|A + tU|, |B + tV|); the minimum sits at an
    // endpoint, a coordinate zero, or where the two absolute values cross.
    double A = a.x() - v.x(), B = a.y() - v.y();
    double U = b.x() - a.x(), V = b.y() - a.y();
    std::vector<double> ts = {0.0, 1.0};
    auto push = [&](double num, double den) {
      if (den != 0.0) {
        double t = num / den;
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    };
    push(-A, U);
    push(-B, V);
    push(B - A, U - V);
    push(-(A + B), U + V);
    double best = std::numeric_limits<double>::infinity();
    for (double t : ts) best = std::min(best, std::max(std::abs(A + t * U), std::abs(B + t * V)));
    return best;
  };
  if (verts.size() == 1) {
    Vector2d a = to_double(verts[0]);
    return std::max(std::abs(a.x() - v.x()), std::abs(a.y() - v.y()));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    best = std::min(best, seg_dist(to_double(verts[i]), to_double(verts[(i + 1) % verts.size()])));
  }
  return best;
}

double dist_point_scaled_polygon(const Vector2d& v, long long n, const ConvexRationalPolygon& P,
                                 Norm norm) {
  if (norm == Norm::euclidean) return dist_point_scaled_polygon(v, n, P);
  if (n < 1) throw std::invalid_argument("dilation factor must be >= 1");
  return dist_point_polygon_sup(v, P.scaled(Rational(n)));
}

Rational hausdorff2(const ConvexRationalPolygon& P, const ConvexRationalPolygon& Q) {
  if (P.empty() || Q.empty()) throw std::invalid_argument("hausdorff of empty polygon");
  Rational best(0);
  for (const RationalVec2& v : P.vertices()) best = std::max(best, dist2_point_polygon(v, Q));
  for (const RationalVec2& v : Q.vertices()) best = std::max(best, dist2_point_polygon(v, P));
  return best;
}

double hausdorff(const ConvexRationalPolygon& P, const ConvexRationalPolygon& Q) {
  return std::sqrt(to_double(hausdorff2(P, Q)));
}

long long max_vertex_denominator(double delta) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  double x = 4.0 / (M_PI * delta * delta);
  if (x >= 9.0e18) throw std::overflow_error("denominator bound exceeds integer range");
  double r = std::nearbyint(x);
  // Inclusive convention at (near-)integer values; see header.
  if (std::abs(x - r) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x))
    return static_cast<long long>(r);
  return static_cast<long long>(std::floor(x));
}

}  // namespace rotaset
