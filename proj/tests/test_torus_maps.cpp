#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rotaset/rng.hpp"
#include "rotaset/torus_maps.hpp"

#include <cmath>

using namespace rotaset;

TEST_CASE("translation and shear evaluation") {
  auto tr = LiftMap::translation(Vector2d(0.25, 0.75));
  CHECK(tr.eval(Vector2d(0.5, 0.5)) == Vector2d(0.75, 1.25));
  CHECK(tr.phi_lipschitz() == 0.0);

  auto sh = LiftMap::shear(0.3);
  Vector2d img = sh.eval(Vector2d(0.0, 0.25));
  CHECK(img.x() == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(img.y() == doctest::Approx(0.25));
}

TEST_CASE("equivariance under integer translations") {
  SplitMix64 rng(3);
  auto maps = {LiftMap::shear(0.3), LiftMap::coupled_shear(0.1, 0.0, 0.3, 0.2),
               LiftMap::pinned(2, 1)};
  for (const LiftMap& map : maps) {
    for (int trial = 0; trial < 200; ++trial) {
      // dyadic base points leave headroom so z + m is exact in binary
      Vector2d z(rng.below(1 << 20) * 0x1.0p-20, rng.below(1 << 20) * 0x1.0p-20);
      Vector2d m(static_cast<double>(static_cast<int>(rng.below(11)) - 5),
                 static_cast<double>(static_cast<int>(rng.below(11)) - 5));
      Vector2d defect = map.eval(z + m) - map.eval(z) - m;
      CHECK(defect.norm() <= 1e-12);
    }
  }
  // the specific offset from the contract
  auto sh = LiftMap::shear(0.3);
  Vector2d z(0.1328125, 0.755859375);
  CHECK((sh.eval(z + Vector2d(5, -3)) - sh.eval(z) - Vector2d(5, -3)).norm() <= 1e-12);
}

TEST_CASE("oscillation estimates") {
  auto tr = LiftMap::translation(Vector2d(0.3, -0.2));
  CHECK(osc(tr, 64).grid_value == 0.0);
  CHECK(osc(tr, 64).certified_upper == 0.0);

  auto sh = LiftMap::shear(0.3);
  auto est = osc(sh, 256);
  CHECK(est.grid_value == doctest::Approx(0.6).epsilon(1e-3));
  CHECK(est.certified_upper >= est.grid_value);

  // coupled shear: range is the full box, diameter sqrt(0.6^2 + 0.4^2);
  // the certified gap shrinks at rate omega(h sqrt(2))
  auto cs = LiftMap::coupled_shear(0, 0, 0.3, 0.2);
  double target = std::hypot(0.6, 0.4);
  double prev_gap = 1e9;
  for (int grid : {32, 64, 128, 256}) {
    auto e = osc(cs, grid);
    CHECK(e.grid_value <= target + 1e-12);
    CHECK(e.certified_upper >= target - 1e-9);  // certified stays above the true value
    double gap = e.certified_upper - e.grid_value;
    CHECK(gap <= 2.0 * cs.omega_phi(std::sqrt(2.0) / (2 * grid)) + 1e-12);
    CHECK(gap <= prev_gap + 1e-12);
    prev_gap = gap;
  }
  CHECK(std::abs(osc(cs, 256).grid_value - target) < 2e-3);
}

TEST_CASE("compose_rotation") {
  auto id = LiftMap::translation(Vector2d(0, 0));
  auto rot = id.composed_with_rotation(Vector2d(0.5, 0.0));
  CHECK(rot.eval(Vector2d(0.2, 0.2)) == Vector2d(0.7, 0.2));

  auto sh = LiftMap::shear(0.3);
  auto a = sh.composed_with_rotation(Vector2d(0.1, 0.2)).composed_with_rotation(Vector2d(0.3, -0.1));
  auto b = sh.composed_with_rotation(Vector2d(0.4, 0.1));
  SplitMix64 rng(5);
  for (int i = 0; i < 50; ++i) {
    Vector2d z = rng.point_in_unit_square();
    CHECK((a.eval(z) - b.eval(z)).norm() <= 1e-15);
  }

  // oscillation is translation invariant
  CHECK(osc(a, 128).grid_value == doctest::Approx(osc(sh, 128).grid_value));
}

TEST_CASE("certified modulus holds empirically") {
  SplitMix64 rng(9);
  auto maps = {LiftMap::shear(0.3), LiftMap::coupled_shear(0.05, 0.1, 0.3, 0.2),
               LiftMap::pinned(5, 1)};
  for (const LiftMap& map : maps) {
    for (int trial = 0; trial < 300; ++trial) {
      Vector2d z = rng.point_in_unit_square();
      Vector2d w = rng.point_in_unit_square();
      double dist = (z - w).norm();
      double lhs = (map.eval(z) - map.eval(w)).norm();
      CHECK(lhs <= dist + map.omega_phi(dist) + 1e-12);
    }
  }
}

TEST_CASE("pinned family carries its periodic orbit and fixed point exactly") {
  for (auto [q, p1] : {std::pair<int, int>{2, 1}, {3, 1}, {5, 1}, {5, 2}}) {
    auto map = LiftMap::pinned(q, p1);
    auto orbit = map.pinned_orbit();
    REQUIRE(static_cast<int>(orbit.size()) == q);
    // each step advances by exactly (p1/q, 0)
    Vector2d z = orbit[0];
    for (int t = 0; t < q; ++t) {
      Vector2d next = map.eval(z);
      CHECK((next - z - Vector2d(static_cast<double>(p1) / q, 0)).norm() <= 1e-13);
      z = next;
    }
    CHECK((z - orbit[0] - Vector2d(p1, 0)).norm() <= 1e-12);
    // attracting fixed point on the mid circle
    Vector2d fp(0, 0.5);
    CHECK((map.eval(fp) - fp).norm() <= 1e-12);
  }
  CHECK_THROWS(LiftMap::pinned(4, 2));  // gcd(p1, q) != 1
}

TEST_CASE("pseudo orbit validation") {
  auto sh = LiftMap::shear(0.3);
  PseudoOrbit orbit;
  orbit.delta = 0.05;
  Vector2d z(0.2, 0.3);
  orbit.points.push_back(z);
  SplitMix64 rng(31);
  for (int i = 0; i < 50; ++i) {
    z = sh.eval(z) + rng.point_in_disk(0.049);
    orbit.points.push_back(z);
  }
  CHECK(orbit.valid(sh));
  CHECK(orbit.max_step_defect(sh) < 0.05);
  orbit.points.back() += Vector2d(0.2, 0.0);
  CHECK(!orbit.valid(sh));

  PseudoOrbit true_orbit;
  true_orbit.delta = 0.0;
  true_orbit.points = {Vector2d(0.1, 0.1), sh.eval(Vector2d(0.1, 0.1))};
  CHECK(true_orbit.valid(sh));
}

TEST_CASE("verify_lift on healthy maps") {
  auto id = LiftMap::translation(Vector2d(0, 0));
  auto rep = verify_lift(id, 64);
  CHECK(rep.structural_ok);
  CHECK(rep.periodicity_defect <= 1e-12);
  CHECK(rep.degree_one);
  CHECK(!rep.injectivity_suspect);
  CHECK(rep.conservative_checked);
  CHECK(rep.conservative_claim_plausible);

  // large shear stays bijective; the report just shows the large oscillation
  auto big = LiftMap::shear(10.0);
  auto rep2 = verify_lift(big, 64);
  CHECK(!rep2.injectivity_suspect);
  CHECK(rep2.degree_one);
  CHECK(rep2.osc_grid > 19.0);
}

TEST_CASE("verify_lift flags a constructed violation") {
  // grid field sampled from the non-periodic phi(x, y) = (1.2 x, 0): the wrap
  // seam folds the map back, which the injectivity check must witness
  int n = 32;
  std::vector<float> data(static_cast<std::size_t>(n) * n * 2, 0.0f);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      data[(static_cast<std::size_t>(j) * n + i) * 2] = static_cast<float>(1.2 * i / n);
  auto broken = LiftMap::grid_field(n, data);
  auto rep = verify_lift(broken, 64);
  CHECK(rep.injectivity_suspect);
}

TEST_CASE("grid field approximates its analytic source") {
  int n = 64;
  std::vector<float> data(static_cast<std::size_t>(n) * n * 2);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      data[(static_cast<std::size_t>(j) * n + i) * 2] =
          static_cast<float>(0.3 * std::sin(2 * M_PI * y));
      data[(static_cast<std::size_t>(j) * n + i) * 2 + 1] =
          static_cast<float>(0.2 * std::sin(2 * M_PI * x));
    }
  auto gf = LiftMap::grid_field(n, data);
  auto cs = LiftMap::coupled_shear(0, 0, 0.3, 0.2);
  SplitMix64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    Vector2d z = rng.point_in_unit_square();
    CHECK((gf.eval(z) - cs.eval(z)).norm() < cs.omega_phi(std::sqrt(2.0) / n) + 1e-6);
  }
  CHECK(gf.phi_lipschitz() <= cs.phi_lipschitz() * 1.5);
  CHECK(verify_lift(gf, 64).degree_one);
}
