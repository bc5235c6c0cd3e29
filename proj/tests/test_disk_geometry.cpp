#include <random>

#include "catch_amalgamated.hpp"
#include "innerlevel/disk_geometry.hpp"

using namespace innerlevel;

namespace {

std::mt19937_64 rng(0x5eed5eedULL);

cplx random_disk_point(double max_radius = 0.95) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r = max_radius * std::sqrt(unit(rng));
  double t = kTwoPi * unit(rng);
  return std::polar(r, t);
}

}  // namespace

TEST_CASE("mobius_eval pins the defining identities") {
  CHECK(std::abs(mobius_eval(cplx(0.5, 0.0), cplx(0.5, 0.0))) == 0.0);
  CHECK(mobius_eval(cplx(0.0, 0.0), cplx(0.3, 0.4)) == cplx(0.3, 0.4));
  CHECK(std::abs(mobius_eval(cplx(0.5, 0.0), cplx(0.0, 0.0)) - cplx(0.5, 0.0)) < 1e-15);
  CHECK_THROWS_AS(mobius_eval(cplx(1.0, 0.0), cplx(0.0, 0.0)), Error);
  CHECK_THROWS_AS(mobius_eval(cplx(0.8, 0.7), cplx(0.0, 0.0)), Error);
}

TEST_CASE("mobius factor identities on random inputs") {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    cplx a = random_disk_point(0.98);
    cplx z = random_disk_point(0.999);
    cplx w = mobius_eval(a, z);
    CHECK(std::abs(w) < 1.0);
    // the unnormalized factor psi_a = (a-z)/(1-conj(a)z) is an involution;
    // strip the |a|/a prefactor to recover it
    cplx pref = cplx(std::abs(a), 0.0) / a;
    cplx psi = w / pref;
    cplx psi2 = mobius_eval(a, psi) / pref;
    CHECK(std::abs(psi2 - z) < 1e-10);
    // phi_a(a) = 0 and phi_a(0) = |a| hold for the normalized map
    CHECK(std::abs(mobius_eval(a, a)) < 1e-14);
    CHECK(std::abs(mobius_eval(a, cplx(0.0, 0.0)) - cplx(std::abs(a), 0.0)) < 1e-14);
    // unimodular on the circle
    cplx xi = std::polar(1.0, kTwoPi * unit(rng));
    CHECK(std::abs(std::abs(mobius_eval(a, xi)) - 1.0) < 1e-12);
  }
}

TEST_CASE("pseudo_distance basic values") {
  CHECK(pseudo_distance(cplx(0.0, 0.0), cplx(0.3, 0.4)) == Catch::Approx(0.5).margin(1e-15));
  CHECK(pseudo_distance(cplx(0.2, -0.1), cplx(0.2, -0.1)) == 0.0);
  // (0.5, -0.5): |z-w|/|1-conj(w)z| = 1/1.25
  CHECK(pseudo_distance(cplx(0.5, 0.0), cplx(-0.5, 0.0)) == Catch::Approx(0.8).margin(1e-15));
}

TEST_CASE("pseudo_distance is symmetric and matches |phi_w(z)|") {
  for (int i = 0; i < 2000; ++i) {
    cplx z = random_disk_point(), w = random_disk_point();
    double d = pseudo_distance(z, w);
    CHECK(d == Catch::Approx(pseudo_distance(w, z)).margin(1e-14));
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    if (std::abs(w) > 0.0)
      CHECK(std::abs(d - std::abs(mobius_eval(w, z))) < 1e-12);
  }
}

TEST_CASE("pseudo_disk_to_euclidean closed form") {
  // metric balls centered at the origin coincide with Euclidean ones
  EuclideanDisk d0 = pseudo_disk_to_euclidean({UnitDiskPoint(cplx(0.0, 0.0)), 0.37});
  CHECK(std::abs(d0.center) < 1e-15);
  CHECK(d0.radius == Catch::Approx(0.37).margin(1e-15));

  // hand value: D_rho(0.5, 0.5) has real diameter endpoints {0, 0.8}
  EuclideanDisk d1 = pseudo_disk_to_euclidean({UnitDiskPoint(cplx(0.5, 0.0)), 0.5});
  CHECK(d1.center.real() == Catch::Approx(0.4).margin(1e-14));
  CHECK(std::abs(d1.center.imag()) < 1e-15);
  CHECK(d1.radius == Catch::Approx(0.4).margin(1e-14));
}

TEST_CASE("pseudo disk boundary round-trip: 1000 samples on the circle") {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    cplx c = random_disk_point(0.9);
    double r = 0.05 + 0.9 * unit(rng);
    PseudoDisk pd{UnitDiskPoint(c), r};
    EuclideanDisk ed = pseudo_disk_to_euclidean(pd);
    // the converted disk must stay inside the closed unit disk
    CHECK(std::abs(ed.center) + ed.radius <= 1.0 + 1e-12);
    for (int k = 0; k < 50; ++k) {
      cplx p = ed.center + std::polar(ed.radius, kTwoPi * unit(rng));
      CHECK(std::abs(pseudo_distance(p, c) - r) < 1e-9);
    }
  }
}

TEST_CASE("cone containment: wide lens swallows a narrow cone") {
  StolzCone cone(0.0, 0.1, 0.9);
  auto res = cone_in_union_test(cone, 0.99, 4096);
  CHECK(res.status == ConeContainment::contained);
  CHECK(res.samples_used >= 100);
}

TEST_CASE("cone containment: small rho0 rejects a wide cone near the cusp") {
  StolzCone cone(0.0, 0.4 * kPi / 2, 0.5);
  auto res = cone_in_union_test(cone, 0.1, 4096);
  CHECK(res.status == ConeContainment::not_contained);
  // the worst offender sits on the cone edge near the cusp, with
  // rho to the axis about sin(b)/sqrt(3cos^2(b)+1) ~ 0.34
  CHECK(res.worst_min_rho > 0.3);
}

TEST_CASE("cone containment: degenerate radial ray lies in every chain") {
  StolzCone ray(0.0, 0.0, 0.5);
  auto res = cone_in_union_test(ray, 0.05, 512);
  CHECK(res.status == ConeContainment::contained);
  CHECK(res.worst_min_rho < 1e-9);
}

TEST_CASE("cone containment input validation") {
  CHECK_THROWS_AS(cone_in_union_test(StolzCone(0.0, 0.1, 0.9), 0.5, 50), Error);
  CHECK_THROWS_AS(StolzCone(0.0, kPi / 2, 0.9), Error);
  CHECK_THROWS_AS(StolzCone(0.0, 0.1, 1.5), Error);
}
