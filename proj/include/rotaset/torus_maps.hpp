#pragma once

#include "rotaset/geometry.hpp"
#include "rotaset/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rotaset {

// Fractional part componentwise, in [0,1)^2.
Vector2d torus_point(const Vector2d& z);

// Shortest representative of b - a on the torus (components in [-1/2, 1/2]).
Vector2d torus_delta(const Vector2d& a, const Vector2d& b);

double torus_distance(const Vector2d& a, const Vector2d& b, Norm norm = Norm::euclidean);

// Compactly supported homeomorphism of the torus that translates a stadium
// neighbourhood of the segment [start, start + len*dir] by len*dir, with the
// displacement magnitude constant on the segment and ramping to zero over
// `taper` along the axis and `halfwidth` across it. Because the displacement
// is parallel to the axis and the transverse coordinate is preserved,
// injectivity reduces to monotonicity along each chord, which holds whenever
// len * max|profile'| < taper. The construction throws if that margin, or the
// requirement that the support fits inside a fundamental domain, fails.
struct StadiumBump {
  Vector2d start;
  Vector2d dir;  // unit vector
  double len = 0;
  double taper = 0;
  double halfwidth = 0;

  static constexpr double kProfileSlope = 1.5396007178390018;  // max |d/du (1-u^2)^2|

  StadiumBump(const Vector2d& start, const Vector2d& displacement, double taper,
              double halfwidth);

  // Z^2-periodic displacement field of the bump at z (any representative).
  Vector2d displacement_at(const Vector2d& z) const;
  Vector2d apply(const Vector2d& z) const { return z + displacement_at(z); }

  double max_displacement() const { return len; }
  double lipschitz() const;

  // Euclidean distance from the nearest torus image of p to the support.
  double distance_to_support(const Vector2d& p) const;
};

// Lift f~ = id + phi of a torus homeomorphism isotopic to the identity.
// phi is Z^2-periodic by construction (evaluated on the fractional part), and
// every instance carries a certified Lipschitz bound for phi from which the
// modulus of continuity of f~ follows. Maps are immutable; the perturbation
// engine returns new instances with post-composed bumps.
class LiftMap {
 public:
  enum class Family { translation, shear, coupled_shear, pinned, grid_field };

  LiftMap() = default;  // identity lift

  struct PinnedParams {
    int q = 1;
    int p1 = 0;
    double stir = 0;         // amplitude of the phase term locking the periodic orbit
    double stir2 = 0;        // amplitude locking the fixed point on the y=1/2 circle
    double contraction = 0;  // vertical contraction amplitude
  };

  static LiftMap translation(const Vector2d& v);
  static LiftMap shear(double r);
  static LiftMap coupled_shear(double a, double b, double r, double s);
  // Pinned family: the circle y=0 carries an attracting q-periodic orbit with
  // rotation vector (p1/q, 0) hit exactly, the circle y=1/2 an attracting
  // fixed point, and the vertical dynamics contracts toward both circles.
  // Defaults keep the map a homeomorphism for every q >= 1, gcd(p1, q) = 1.
  static LiftMap pinned(int q, int p1);
  static LiftMap pinned(int q, int p1, double stir, double stir2, double contraction);
  // Displacement samples at nodes (i/n, j/n); value (i,j,c) at data[(j*n+i)*2+c].
  static LiftMap grid_field(int n, std::vector<float> data);

  Family family() const { return family_; }
  const PinnedParams& pinned_params() const { return pin_; }

  Vector2d eval(const Vector2d& z) const;
  Vector2d displacement(const Vector2d& z) const { return eval(z) - z; }
  Vector2d iterate(Vector2d z, long long n) const;

  // Certified Lipschitz constant of phi.
  double phi_lipschitz() const { return phi_lipschitz_; }
  // Certified modulus of continuity of f~ itself: omega(h) = h * (1 + L).
  double omega(double h) const { return h * (1.0 + phi_lipschitz_); }
  double omega_phi(double h) const { return h * phi_lipschitz_; }
  // Certified bound on sup |phi|.
  double phi_sup_bound() const { return phi_sup_; }

  LiftMap composed_with_rotation(const Vector2d& v) const;
  LiftMap with_bump(const StadiumBump& bump) const;
  LiftMap with_bumps(const std::vector<StadiumBump>& bumps) const;
  const std::vector<StadiumBump>& bumps() const { return bumps_; }
  const Vector2d& rotation_offset() const { return rotation_offset_; }

  // Lifts are anchored so the base family has phi(0,0) in [0,1)^2; the integer
  // offset that was subtracted is kept for reporting.
  const Vector2i& anchor_offset() const { return anchor_offset_; }

  bool conservative_flag() const { return conservative_; }
  LiftMap with_conservative_flag(bool flag) const;
  const std::vector<std::string>& annotations() const { return annotations_; }

  // Attracting periodic orbit built into the pinned family (torus points).
  std::vector<Vector2d> pinned_orbit() const;

 private:
  Vector2d base_displacement(const Vector2d& frac) const;
  void finish_construction();

  Family family_ = Family::translation;
  Vector2d trans_{0, 0};
  double r_ = 0, s_ = 0;
  PinnedParams pin_;
  int grid_n_ = 0;
  std::vector<float> grid_;
  Vector2d rotation_offset_{0, 0};
  Vector2i anchor_offset_{0, 0};
  std::vector<StadiumBump> bumps_;
  double phi_lipschitz_ = 0;
  double phi_sup_ = 0;
  bool conservative_ = false;
  std::vector<std::string> annotations_;
};

// Finite pseudo-orbit of lifted points with tolerance delta (delta = 0 means a
// true orbit up to evaluation round-off).
struct PseudoOrbit {
  std::vector<Vector2d> points;
  double delta = 0;

  // Max over i of d(f~(x_i), x_{i+1}).
  double max_step_defect(const LiftMap& map, Norm norm = Norm::euclidean) const;
  bool valid(const LiftMap& map, Norm norm = Norm::euclidean) const;
};

struct OscillationEstimate {
  double grid_value = 0;      // diameter of sampled phi values
  double certified_upper = 0; // grid value + 2 * omega_phi(sample radius)
  int grid = 0;
};

// Upper bound for osc(f) = diam phi(T^2): grid maximum plus omega inflation.
OscillationEstimate osc(const LiftMap& map, int grid = 512);

// Certified bound on sup |phi| from sampling plus omega inflation; never
// exceeds phi_sup_bound() by construction.
double sup_displacement(const LiftMap& map, int grid = 256);

struct LiftValidationReport {
  bool structural_ok = true;        // finite values everywhere sampled
  double periodicity_defect = 0;    // max |f~(z+m) - f~(z) - m| over samples
  double min_image_separation = 0;  // over grid pairs at distance >= 2h
  bool injectivity_suspect = false;
  Vector2d collision_witness_a{0, 0}, collision_witness_b{0, 0};
  double boundary_winding = 0;  // winding of f~(boundary) around an interior image
  bool degree_one = false;
  bool conservative_checked = false;
  double area_defect = 0;  // max relative area distortion over test squares
  bool conservative_claim_plausible = true;
  double osc_grid = 0;

  bool all_ok() const {
    return structural_ok && degree_one && !injectivity_suspect &&
           (!conservative_checked || conservative_claim_plausible);
  }
};

LiftValidationReport verify_lift(const LiftMap& map, int grid = 128);

}  // namespace rotaset
