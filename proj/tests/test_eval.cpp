#include <random>

#include "catch_amalgamated.hpp"
#include "innerlevel/eval.hpp"

using namespace innerlevel;

namespace {

std::mt19937_64 rng(0xabcdef12ULL);

cplx random_disk_point(double max_radius = 0.9) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::polar(max_radius * std::sqrt(unit(rng)), kTwoPi * unit(rng));
}

InnerExpr atomic_S() {
  return InnerExpr::singular({{{BoundaryPoint(0.0), 1.0}}});
}

InnerExpr blaschke_single(double a) {
  return InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(a, 0.0), 1}}));
}

// long-partial-product oracle for the geometric Blaschke modulus at 0:
// |B(0)| = prod (1 - 2^-n)
double geometric_modulus_at_zero() {
  double p = 1.0;
  for (int n = 1; n <= 80; ++n) p *= 1.0 - std::pow(0.5, n);
  return p;
}

}  // namespace

TEST_CASE("eval_disk: atomic singular factor at the origin") {
  EvalResult r = eval_disk(atomic_S(), UnitDiskPoint(cplx(0.0, 0.0)), 1e-12);
  CHECK(std::abs(r.value - cplx(std::exp(-1.0), 0.0)) < 1e-14);
}

TEST_CASE("eval_disk: single Blaschke factor") {
  EvalResult r = eval_disk(blaschke_single(0.5), UnitDiskPoint(cplx(0.0, 0.0)), 1e-12);
  CHECK(std::abs(r.value) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("eval_disk: geometric product modulus at 0 matches the long product") {
  InnerExpr b = InnerExpr::blaschke(ZeroSequence::geometric(0.5));
  EvalResult r = eval_disk(b, UnitDiskPoint(cplx(0.0, 0.0)), 1e-10);
  double oracle = geometric_modulus_at_zero();
  CHECK(oracle == Catch::Approx(0.2887880951).margin(1e-9));
  CHECK(std::abs(std::abs(r.value) - oracle) <= r.abs_error_bound + 1e-12);
  CHECK(r.abs_error_bound <= 1e-10);
}

TEST_CASE("eval_disk error bound is honest under depth quadrupling") {
  std::vector<InnerExpr> exprs = {
      InnerExpr::blaschke(ZeroSequence::geometric(0.5)),
      InnerExpr::blaschke(ZeroSequence::factorial()),
      InnerExpr::blaschke(ZeroSequence::negated_mirror(ZeroSequence::factorial())),
  };
  for (const auto& u : exprs) {
    const ZeroSequence& seq = u.zeros();
    for (int i = 0; i < 100; ++i) {
      cplx z = random_disk_point(0.97);
      double eps = 1e-9;
      std::size_t N = truncation_depth(seq, UnitDiskPoint(z), eps);
      auto partial = [&](std::size_t upto) {
        cplx v(1.0, 0.0);
        for (std::size_t n = 1; n <= upto; ++n)
          v *= detail::blaschke_factor_jet(seq.zero(n), z).f;
        return v;
      };
      CHECK(std::abs(partial(N) - partial(4 * N)) <= eps);
    }
  }
}

TEST_CASE("eval_boundary basic values") {
  CHECK(std::abs(eval_boundary(InnerExpr::identity(), BoundaryPoint(1.2), 1e-12) -
                 std::polar(1.0, 1.2)) < 1e-15);
  // S(-1) = exp(0) = 1
  CHECK(std::abs(eval_boundary(atomic_S(), BoundaryPoint(kPi), 1e-12) - cplx(1.0, 0.0)) < 1e-14);
  // phi_{1/2}(-1) = (1/2 + 1)/(1 + 1/2) = 1
  CHECK(std::abs(eval_boundary(blaschke_single(0.5), BoundaryPoint(kPi), 1e-12) -
                 cplx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("eval_boundary refuses points inside the exclusion zone") {
  CHECK_THROWS_AS(eval_boundary(atomic_S(), BoundaryPoint(1e-5), 1e-10), SingularProximityError);
  InnerExpr b = InnerExpr::blaschke(ZeroSequence::geometric(0.5));
  CHECK_THROWS_AS(eval_boundary(b, BoundaryPoint(1e-6), 1e-10), SingularProximityError);
  // the error names the offending singularity
  try {
    eval_boundary(InnerExpr::singular({{{BoundaryPoint(2.0), 1.0}}}), BoundaryPoint(2.0001),
                  1e-10);
    FAIL("expected SingularProximityError");
  } catch (const SingularProximityError& e) {
    CHECK(e.offending_theta == Catch::Approx(2.0));
  }
}

TEST_CASE("truncation_depth reports the required depth when capped") {
  EvalOptions opt;
  opt.max_depth = 8;
  ZeroSequence slow = ZeroSequence::geometric(0.99);
  try {
    truncation_depth(slow, UnitDiskPoint(cplx(0.0, 0.0)), 1e-12, opt);
    FAIL("expected DepthError");
  } catch (const DepthError& e) {
    CHECK(e.required_depth_estimate > 8);
  }
}

TEST_CASE("inner-ness: interior values stay inside, boundary values unimodular") {
  std::vector<InnerExpr> exprs = {
      blaschke_single(0.5),
      InnerExpr::blaschke(ZeroSequence::geometric(0.5)),
      InnerExpr::blaschke(ZeroSequence::factorial()),
      atomic_S(),
      product(atomic_S(), InnerExpr::blaschke(ZeroSequence::factorial())),
      compose(InnerExpr::blaschke(ZeroSequence::geometric(0.5)), atomic_S()),
      frostman_shift(blaschke_single(0.5), cplx(0.3, 0.2)),
      reflect(atomic_S()),
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& u : exprs) {
    for (int i = 0; i < 60; ++i) {
      cplx z = random_disk_point(0.95);
      EvalResult r = eval_disk(u, UnitDiskPoint(z), 1e-10);
      CHECK(std::abs(r.value) < 1.0 + 1e-10);
    }
    for (int i = 0; i < 40; ++i) {
      // keep probes away from the singular directions at ±1
      double theta = 0.3 + (kPi - 0.6) * unit(rng);
      if (i % 2) theta = -theta;
      cplx w = eval_boundary(u, BoundaryPoint(theta), 1e-10);
      CHECK(std::abs(std::abs(w) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("structural constructors agree with pointwise arithmetic") {
  InnerExpr u = blaschke_single(0.5);
  InnerExpr v = atomic_S();
  for (int i = 0; i < 100; ++i) {
    cplx z = random_disk_point();
    UnitDiskPoint p(z);
    cplx uv = eval_disk(product(u, v), p, 1e-12).value;
    cplx ue = eval_disk(u, p, 1e-13).value;
    cplx ve = eval_disk(v, p, 1e-13).value;
    CHECK(std::abs(uv - ue * ve) < 1e-11);

    cplx comp = eval_disk(compose(u, v), p, 1e-12).value;
    CHECK(std::abs(comp - eval_disk(u, UnitDiskPoint(ve), 1e-13).value) < 1e-10);

    cplx shifted = eval_disk(frostman_shift(u, cplx(0.2, 0.1)), p, 1e-12).value;
    CHECK(std::abs(shifted - mobius_eval(cplx(0.2, 0.1), ue)) < 1e-10);

    cplx refl = eval_disk(reflect(u), p, 1e-12).value;
    CHECK(std::abs(refl - eval_disk(u, UnitDiskPoint(-z), 1e-13).value) < 1e-12);
  }
}

TEST_CASE("compose with the identity is pointwise the identity on the tree") {
  InnerExpr u = InnerExpr::blaschke(ZeroSequence::geometric(0.5));
  InnerExpr cu = compose(u, InnerExpr::identity());
  for (int i = 0; i < 100; ++i) {
    cplx z = random_disk_point();
    CHECK(std::abs(eval_disk(cu, UnitDiskPoint(z), 1e-12).value -
                   eval_disk(u, UnitDiskPoint(z), 1e-12).value) < 1e-11);
  }
}

TEST_CASE("product with a unimodular constant keeps the modulus") {
  InnerExpr u = blaschke_single(0.5);
  InnerExpr p = product(u, InnerExpr::unimodular(2.1));
  for (int i = 0; i < 50; ++i) {
    cplx z = random_disk_point();
    CHECK(std::abs(std::abs(eval_disk(p, UnitDiskPoint(z), 1e-12).value) -
                   std::abs(eval_disk(u, UnitDiskPoint(z), 1e-12).value)) < 1e-12);
  }
}

TEST_CASE("remove_zero splits a factor off structurally") {
  // remove the only zero: a unimodular constant remains
  InnerExpr phi = blaschke_single(0.5);
  InnerExpr rest = remove_zero(phi, cplx(0.5, 0.0));
  CHECK(rest.tag() == InnerExpr::Tag::unimodular);

  // z * phi_{1/2} with the 1/2 removed behaves like z
  InnerExpr zphi = InnerExpr::blaschke(
      ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), 1}, {cplx(0.5, 0.0), 1}}));
  InnerExpr z_only = remove_zero(zphi, cplx(0.5, 0.0));
  UnitDiskPoint probe(cplx(0.0, 0.3));
  CHECK(std::abs(eval_disk(z_only, probe, 1e-13).value - cplx(0.0, 0.3)) < 1e-13);

  // parametric: drop the first geometric zero, check the product identity
  InnerExpr g = InnerExpr::blaschke(ZeroSequence::geometric(0.5));
  InnerExpr g_rest = remove_zero(g, cplx(0.5, 0.0));
  for (int i = 0; i < 50; ++i) {
    cplx z = random_disk_point();
    cplx whole = eval_disk(g, UnitDiskPoint(z), 1e-12).value;
    cplx part = eval_disk(g_rest, UnitDiskPoint(z), 1e-12).value;
    CHECK(std::abs(part * mobius_eval(cplx(0.5, 0.0), z) - whole) < 1e-10);
  }

  CHECK_THROWS_AS(remove_zero(g, cplx(0.123, 0.456)), Error);
}

TEST_CASE("reflected trees remove mirrored zeros") {
  InnerExpr r = reflect(blaschke_single(0.5));  // zero at -0.5
  InnerExpr rest = remove_zero(r, cplx(-0.5, 0.0));
  for (int i = 0; i < 20; ++i) {
    cplx z = random_disk_point();
    cplx whole = eval_disk(r, UnitDiskPoint(z), 1e-12).value;
    cplx part = eval_disk(rest, UnitDiskPoint(z), 1e-12).value;
    CHECK(std::abs(part * mobius_eval(cplx(-0.5, 0.0), z) - whole) < 1e-10);
  }
}

TEST_CASE("schwarz-pick contraction for sample expressions") {
  std::vector<InnerExpr> exprs = {
      blaschke_single(0.5),
      InnerExpr::blaschke(ZeroSequence::geometric(0.5)),
      atomic_S(),
      compose(atomic_S(), blaschke_single(0.3)),
  };
  for (const auto& u : exprs) {
    for (int i = 0; i < 200; ++i) {
      cplx z = random_disk_point(), w = random_disk_point();
      cplx uz = eval_disk(u, UnitDiskPoint(z), 1e-12).value;
      cplx uw = eval_disk(u, UnitDiskPoint(w), 1e-12).value;
      CHECK(pseudo_distance(uz, uw) <= pseudo_distance(z, w) + 1e-9);
    }
  }
}
