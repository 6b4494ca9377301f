#pragma once

#include "rotaset/rational.hpp"

#include <cstdint>
#include <vector>

namespace rotaset {

// Global norm choice for point-to-set distances. The disk-area pigeonhole
// behind the denominator bound is Euclidean, so that is the default.
enum class Norm { euclidean, sup };

// Convex polygon with exact rational vertices, stored counterclockwise and
// strictly convex (no vertex lies in the hull of the others). Degenerate
// cases are first-class: one vertex is a point, two vertices a segment.
// The vertex list starts at the lexicographically smallest vertex, so equal
// polygons have equal vertex sequences.
class ConvexRationalPolygon {
 public:
  ConvexRationalPolygon() = default;

  // Exact convex hull (monotone chain). Throws on an empty input.
  static ConvexRationalPolygon hull(const std::vector<RationalVec2>& points);

  // Wraps vertices that are already a canonical strictly convex CCW list;
  // re-hulls and throws if they are not.
  static ConvexRationalPolygon from_vertices(const std::vector<RationalVec2>& vertices);

  bool empty() const { return verts_.empty(); }
  std::size_t size() const { return verts_.size(); }
  bool is_point() const { return verts_.size() == 1; }
  bool is_segment() const { return verts_.size() == 2; }
  const std::vector<RationalVec2>& vertices() const { return verts_; }
  const RationalVec2& vertex(std::size_t i) const { return verts_[i]; }

  // Twice the signed area; zero for points and segments.
  Rational doubled_area() const;

  // Closed membership test, exact.
  bool contains(const RationalVec2& p) const;
  bool contains(const ConvexRationalPolygon& other) const;

  struct SupportResult {
    double value = 0.0;
    Rational exact_value;
    std::vector<int> argmax;  // all attaining vertex indices; ties give the full edge
  };

  // Support function max <v, dir>. The direction is converted to an exact
  // rational vector, so argmax ties are decided exactly. Zero direction throws.
  SupportResult support(const Vector2d& direction) const;
  SupportResult support_exact(const RationalVec2& direction) const;

  ConvexRationalPolygon scaled(const Rational& factor) const;
  ConvexRationalPolygon translated(const RationalVec2& offset) const;

  bool operator==(const ConvexRationalPolygon& other) const { return verts_ == other.verts_; }
  bool operator!=(const ConvexRationalPolygon& other) const { return !(*this == other); }

 private:
  std::vector<RationalVec2> verts_;
};

// Exact squared Euclidean distance from a point to the polygon (0 if inside).
Rational dist2_point_polygon(const RationalVec2& p, const ConvexRationalPolygon& P);

// Euclidean distance from v to the dilation n*P. The square of the returned
// value is exact; only the final square root is floating point.
double dist_point_scaled_polygon(const Vector2d& v, long long n, const ConvexRationalPolygon& P);
Rational dist2_point_scaled_polygon(const RationalVec2& v, long long n,
                                    const ConvexRationalPolygon& P);

// Sup-norm variant (float path); used when the global norm flag is sup.
double dist_point_polygon_sup(const Vector2d& v, const ConvexRationalPolygon& P);

double dist_point_scaled_polygon(const Vector2d& v, long long n, const ConvexRationalPolygon& P,
                                 Norm norm);

// Symmetric Hausdorff distance between convex polygons. For convex sets the
// sup of d(., Q) over P is attained at a vertex, so vertex scans are exact.
double hausdorff(const ConvexRationalPolygon& P, const ConvexRationalPolygon& Q);
Rational hausdorff2(const ConvexRationalPolygon& P, const ConvexRationalPolygon& Q);

// floor(4 / (pi delta^2)), the largest reduced denominator an extremal point
// of a delta-upper-stable rotation set can have. When the value is within a
// few ulp of an integer it is reported inclusively (the underlying disk-area
// inequality is strict). Returns 0 when the bound is degenerate (delta large).
long long max_vertex_denominator(double delta);

}  // namespace rotaset
