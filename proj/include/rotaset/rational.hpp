#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rotaset {

// All polygon vertices and cycle means are kept in exact rational arithmetic;
// floating point only appears in distances and map evaluation.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using Eigen::Vector2d;
using Eigen::Vector2i;
using RationalVec2 = Eigen::Matrix<Rational, 2, 1>;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

// Doubles are dyadic rationals; the conversion is exact.
inline Rational exact(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(x);
}

inline RationalVec2 exact(const Vector2d& v) {
  RationalVec2 r;
  r << exact(v.x()), exact(v.y());
  return r;
}

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline Vector2d to_double(const RationalVec2& v) {
  return Vector2d(to_double(v.x()), to_double(v.y()));
}

inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

// Accepts "p/q" or a plain integer "p"; the stored value is reduced.
inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s), BigInt(1));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational '" + s + "'");
  }
}

inline Rational cross2(const RationalVec2& a, const RationalVec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Smallest q with v = p/q componentwise; vertices of cycle-mean polygons have
// q bounded by the cycle length, rotation vectors by the orbit period.
inline BigInt common_denominator(const RationalVec2& v) {
  return lcm(denominator(v.x()), denominator(v.y()));
}

struct ReducedVector {
  BigInt p1, p2, q;  // v = (p1/q, p2/q), gcd(p1, p2, q) = 1, q >= 1
};

inline ReducedVector reduce_to_common_denominator(const RationalVec2& v) {
  ReducedVector r;
  r.q = common_denominator(v);
  r.p1 = numerator(v.x()) * (r.q / denominator(v.x()));
  r.p2 = numerator(v.y()) * (r.q / denominator(v.y()));
  return r;
}

// Best rational approximation with denominator <= max_den (Stern-Brocot walk).
// Used to snap grid-precision polygon vertices onto the denominator budget
// that an upper-stable rotation set must satisfy.
inline Rational bounded_denominator_round(const Rational& x, const BigInt& max_den) {
  if (max_den < 1) throw std::invalid_argument("denominator bound must be >= 1");
  if (denominator(x) <= max_den) return x;
  BigInt fl = numerator(x) / denominator(x);
  if (x < 0 && fl * denominator(x) != numerator(x)) fl -= 1;
  Rational frac = x - Rational(fl);
  // Walk the Stern-Brocot tree between 0/1 and 1/1, keeping the best
  // mediant-bounded approximations of the fractional part.
  BigInt a = 0, b = 1, c = 1, d = 1;
  Rational best_lo(0), best_hi(1);
  while (true) {
    BigInt mn = a + c, md = b + d;
    if (md > max_den) break;
    Rational m(mn, md);
    if (m <= frac) {
      a = mn; b = md; best_lo = m;
    } else {
      c = mn; d = md; best_hi = m;
    }
    if (m == frac) break;
  }
  Rational lo = Rational(a, b), hi = Rational(c, d);
  Rational pick = (frac - lo <= hi - frac) ? lo : hi;
  return pick + Rational(fl);
}

}  // namespace rotaset
