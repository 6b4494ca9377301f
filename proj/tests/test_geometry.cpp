#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rotaset/geometry.hpp"
#include "rotaset/rng.hpp"

#include <cmath>

using namespace rotaset;

namespace {

RationalVec2 rv(long long xn, long long xd, long long yn, long long yd) {
  RationalVec2 v;
  v << make_rational(xn, xd), make_rational(yn, yd);
  return v;
}

RationalVec2 random_rational_point(SplitMix64& rng, long long max_den = 1000) {
  long long dx = 1 + static_cast<long long>(rng.below(max_den));
  long long dy = 1 + static_cast<long long>(rng.below(max_den));
  return rv(static_cast<long long>(rng.below(2 * dx + 1)) - dx, dx,
            static_cast<long long>(rng.below(2 * dy + 1)) - dy, dy);
}

ConvexRationalPolygon unit_square() {
  return ConvexRationalPolygon::hull({rv(0, 1, 0, 1), rv(1, 1, 0, 1), rv(1, 1, 1, 1), rv(0, 1, 1, 1)});
}

}  // namespace

TEST_CASE("convex hull basics") {
  CHECK_THROWS(ConvexRationalPolygon::hull({}));

  auto point = ConvexRationalPolygon::hull({rv(0, 1, 0, 1)});
  CHECK(point.is_point());

  auto tri = ConvexRationalPolygon::hull(
      {rv(0, 1, 0, 1), rv(1, 1, 0, 1), rv(0, 1, 1, 1), rv(1, 4, 1, 4)});
  CHECK(tri.size() == 3);  // interior point dropped
  CHECK(tri.contains(rv(1, 4, 1, 4)));

  auto seg = ConvexRationalPolygon::hull({rv(0, 1, 0, 1), rv(1, 2, 1, 2), rv(1, 1, 1, 1)});
  CHECK(seg.is_segment());
  CHECK(seg.vertex(0) == rv(0, 1, 0, 1));
  CHECK(seg.vertex(1) == rv(1, 1, 1, 1));
}

TEST_CASE("hull matches brute-force oracle on random rational points") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<RationalVec2> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(random_rational_point(rng, 60));
    auto hull = ConvexRationalPolygon::hull(pts);
    auto expected = oracle::brute_force_hull(pts);
    REQUIRE(hull.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(hull.vertex(i) == expected[i]);
  }
}

TEST_CASE("hull idempotence") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RationalVec2> pts;
    for (int i = 0; i < 24; ++i) pts.push_back(random_rational_point(rng));
    auto h = ConvexRationalPolygon::hull(pts);
    CHECK(ConvexRationalPolygon::hull(h.vertices()) == h);
  }
}

TEST_CASE("support function") {
  auto sq = unit_square();
  auto s = sq.support(Vector2d(1, 0));
  CHECK(s.value == doctest::Approx(1.0));
  CHECK(s.argmax.size() == 2);  // full edge on ties

  auto pt = ConvexRationalPolygon::hull({rv(3, 4, -2, 5)});
  auto sp = pt.support(Vector2d(0.3, 0.7));
  CHECK(sp.value == doctest::Approx(0.75 * 0.3 - 0.4 * 0.7));

  CHECK_THROWS(sq.support(Vector2d(0, 0)));

  // random polygon, random direction: equals exhaustive vertex scan
  SplitMix64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<RationalVec2> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(random_rational_point(rng));
    auto poly = ConvexRationalPolygon::hull(pts);
    Vector2d dir = rng.direction();
    auto sup = poly.support(dir);
    Rational best;
    bool first = true;
    RationalVec2 dex = exact(dir);
    for (const auto& v : poly.vertices()) {
      Rational d = v.dot(dex);
      if (first || d > best) best = d, first = false;
    }
    CHECK(sup.exact_value == best);
  }
}

TEST_CASE("support sublinearity via 1-homogeneity") {
  SplitMix64 rng(13);
  std::vector<RationalVec2> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(random_rational_point(rng));
  auto poly = ConvexRationalPolygon::hull(pts);
  for (int trial = 0; trial < 20; ++trial) {
    Vector2d t1 = rng.direction(), t2 = rng.direction();
    double lhs = poly.support(t1 + t2).value;  // may throw only if t1 = -t2 exactly
    CHECK(lhs <= poly.support(t1).value + poly.support(t2).value + 1e-12);
    double c = rng.uniform(0.1, 5.0);
    CHECK(poly.support(c * t1).value == doctest::Approx(c * poly.support(t1).value));
  }
}

TEST_CASE("distance to scaled polygon") {
  auto origin = ConvexRationalPolygon::hull({rv(0, 1, 0, 1)});
  CHECK(dist_point_scaled_polygon(Vector2d(3, 4), 7, origin) == doctest::Approx(5.0));

  auto hseg = ConvexRationalPolygon::hull({rv(0, 1, 0, 1), rv(1, 1, 0, 1)});
  for (long long n : {1, 2, 5, 11})
    CHECK(dist_point_scaled_polygon(Vector2d(n / 2.0, 0), n, hseg) == doctest::Approx(0.0));

  // closest point sits on the corner (2,2) of the dilated square
  auto sq = unit_square();
  CHECK(dist_point_scaled_polygon(Vector2d(2.5, 2.5), 2, sq) ==
        doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(dist2_point_scaled_polygon(exact(Vector2d(2.5, 2.5)), 2, sq) == make_rational(1, 2));
}

TEST_CASE("dist zero iff support certificate holds") {
  SplitMix64 rng(17);
  std::vector<RationalVec2> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(random_rational_point(rng, 20));
  auto poly = ConvexRationalPolygon::hull(pts);
  long long n = 3;
  auto scaled = poly.scaled(Rational(n));
  for (int trial = 0; trial < 60; ++trial) {
    RationalVec2 v = random_rational_point(rng, 15);
    v = (v * Rational(3)).eval();
    bool dist_zero = dist2_point_scaled_polygon(v, n, poly) == 0;
    // certificate set: all edge normals of the scaled polygon
    bool support_ok = true;
    std::size_t m = scaled.size();
    if (m == 1) {
      support_ok = v == scaled.vertex(0);
    } else {
      std::size_t edges = m == 2 ? 1 : m;
      for (std::size_t i = 0; i < edges && support_ok; ++i) {
        RationalVec2 e = scaled.vertex((i + 1) % m) - scaled.vertex(i);
        RationalVec2 nrm;
        nrm << e.y(), -e.x();
        if (v.dot(nrm) > scaled.support_exact(nrm).exact_value) support_ok = false;
        if (m == 2) {  // segment needs both sides and the endpoints
          RationalVec2 mnrm;
          mnrm << -e.y(), e.x();
          if (v.dot(mnrm) > scaled.support_exact(mnrm).exact_value) support_ok = false;
          if (v.dot(e) > scaled.support_exact(e).exact_value) support_ok = false;
          RationalVec2 me = (e * Rational(-1)).eval();
          if (v.dot(me) > scaled.support_exact(me).exact_value) support_ok = false;
        }
      }
    }
    CHECK(dist_zero == support_ok);
  }
}

TEST_CASE("hausdorff") {
  auto sq = unit_square();
  CHECK(hausdorff(sq, sq) == 0.0);
  CHECK(hausdorff2(sq, sq) == 0);

  auto big = sq.scaled(Rational(2));
  CHECK(hausdorff(sq, big) == doctest::Approx(std::sqrt(2.0)));

  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RationalVec2> a, b;
    for (int i = 0; i < 9; ++i) a.push_back(random_rational_point(rng, 30));
    for (int i = 0; i < 9; ++i) b.push_back(random_rational_point(rng, 30));
    auto P = ConvexRationalPolygon::hull(a);
    auto Q = ConvexRationalPolygon::hull(b);
    double exact_val = hausdorff(P, Q);
    double sampled = oracle::sampled_hausdorff(P, Q, 400);
    CHECK(std::abs(exact_val - sampled) <= 1e-6);
    CHECK((hausdorff2(P, Q) == 0) == (P == Q));
  }
}

TEST_CASE("max vertex denominator") {
  CHECK(max_vertex_denominator(0.5) == 5);  // floor(16/pi)
  CHECK(max_vertex_denominator(2.0) == 0);  // degenerate bound
  CHECK_THROWS(max_vertex_denominator(0.0));
  CHECK_THROWS(max_vertex_denominator(-1.0));

  // saturation at q: delta = 2/sqrt(pi q) reports exactly q
  for (long long q = 2; q <= 50; ++q) {
    double delta = 2.0 / std::sqrt(M_PI * static_cast<double>(q));
    CHECK(max_vertex_denominator(delta) == q);
    CHECK(max_vertex_denominator(delta) >= q - 1);
  }

  // antitone in delta
  double prev = 1e18;
  for (double d = 0.05; d < 2.0; d += 0.037) {
    double cur = static_cast<double>(max_vertex_denominator(d));
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("bounded denominator rounding") {
  Rational x = make_rational(355, 113);
  CHECK(bounded_denominator_round(x, BigInt(113)) == x);
  Rational pi_ish = exact(M_PI);
  CHECK(bounded_denominator_round(pi_ish, BigInt(113)) == make_rational(355, 113));
  CHECK(bounded_denominator_round(exact(0.5), BigInt(2)) == make_rational(1, 2));
  CHECK(to_double(bounded_denominator_round(exact(-1.0 / 3.0), BigInt(10))) ==
        doctest::Approx(-1.0 / 3.0));
}
