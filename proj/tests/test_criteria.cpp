#include "catch_amalgamated.hpp"
#include "innerlevel/catalog.hpp"
#include "innerlevel/criteria.hpp"

using namespace innerlevel;

namespace {

InnerExpr z_pow(int k) {
  return InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), k}}));
}

CertifyConfig light_config() {
  CertifyConfig cfg;
  cfg.base_samples = 256;
  cfg.refinements = 2;
  cfg.eta_sweep = {0.3, 0.7};
  cfg.L_min = 6;
  cfg.L_max = 8;
  return cfg;
}

}  // namespace

TEST_CASE("derivative_ratio_sup hand values") {
  // u = z: second derivative vanishes identically
  RatioSupResult r1 = derivative_ratio_sup(z_pow(1), 256, 1e-6);
  CHECK(r1.sup == 0.0);
  // u = z^2: |2| / |2 zeta|^2 = 1/2 at every boundary point
  RatioSupResult r2 = derivative_ratio_sup(z_pow(2), 256, 1e-6);
  CHECK(r2.sup == Catch::Approx(0.5).margin(1e-12));
  // the atomic factor: S''/S'^2 = z on the circle, so the ratio is 1
  RatioSupResult rs = derivative_ratio_sup(get_entry("atomic_S").expr, 512, 1e-6);
  CHECK(rs.sup == Catch::Approx(1.0).margin(1e-9));
  CHECK_THROWS_AS(derivative_ratio_sup(z_pow(1), 100, 1e-6), Error);
}

TEST_CASE("derivative_ratio_sup is monotone on nested sample sets") {
  const InnerExpr& u = get_entry("geometric_b").expr;
  double s1 = derivative_ratio_sup(u, 256, 1e-9).sup;
  double s2 = derivative_ratio_sup(u, 1024, 1e-9).sup;
  double s3 = derivative_ratio_sup(u, 4096, 1e-9).sup;
  CHECK(s1 <= s2 + 1e-12);
  CHECK(s2 <= s3 + 1e-12);
}

TEST_CASE("radial_liminf along singular and regular radii") {
  const InnerExpr& S = get_entry("atomic_S").expr;
  // |S(r)| = exp(-(1+r)/(1-r)) -> 0 into the atom
  RadialLiminfResult into = radial_liminf(S, BoundaryPoint(0.0), 30);
  CHECK(into.value < 1e-10);
  CHECK(into.deepest_n == 30);
  // |S(-r)| = exp(-(1-r)/(1+r)) -> 1 at the antipode
  RadialLiminfResult away = radial_liminf(S, BoundaryPoint(kPi), 30);
  CHECK(away.value > 0.99);

  // the geometric product vanishes along the ladder r_n = 1 - 2^-n (zeros!)
  RadialLiminfResult geo = radial_liminf(get_entry("geometric_b").expr, BoundaryPoint(0.0), 30);
  CHECK(geo.value < 1e-8);
}

TEST_CASE("delta_u_inf hand values") {
  CHECK(delta_u_inf(z_pow(1), 256, 1e-6).inf == Catch::Approx(1.0).margin(1e-12));
  // single zero 1/2: min over the circle of (1-a^2)/|xi-a|^2 sits at xi=-1
  DeltaInfResult d = delta_u_inf(InnerExpr::blaschke(ZeroSequence::explicit_zeros(
                                     {{cplx(0.5, 0.0), 1}})),
                                 1024, 1e-6);
  CHECK(d.inf == Catch::Approx(1.0 / 3.0).margin(1e-4));
  CHECK(arc_distance(d.argmin_theta, kPi) < 0.1);
  // atomic factor: |S'| = 2/|1-xi|^2, minimized at the antipode to 1/2
  DeltaInfResult ds = delta_u_inf(get_entry("atomic_S").expr, 1024, 1e-6);
  CHECK(ds.inf == Catch::Approx(0.5).margin(1e-4));
}

TEST_CASE("delta_u_inf respects the termwise series bound for Blaschke products") {
  const InnerExpr& b = get_entry("geometric_b").expr;
  const ZeroSequence& seq = b.zeros();
  DeltaInfResult d = delta_u_inf(b, 1024, 1e-9);
  double best_bound = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    double a = std::abs(seq.zero(n));
    best_bound = std::max(best_bound, (1.0 - a) / (1.0 + a));
  }
  CHECK(d.inf >= best_bound - 1e-9);
}

TEST_CASE("certify: finite Blaschke products are one-component evidence") {
  Verdict v = certify(z_pow(2), light_config());
  CHECK(v.status == Verdict::Status::evidence_one_component);
  CHECK(!v.reasons.empty());
}

TEST_CASE("certify: the factorial thin product is rejected by ratio divergence") {
  Verdict v = certify(get_entry("factorial_v").expr, light_config());
  CHECK(v.status == Verdict::Status::evidence_not_one_component);
  REQUIRE(v.aleksandrov.ratio_sup_refinements.size() == 3);
  const auto& sup = v.aleksandrov.ratio_sup_refinements;
  CHECK(sup[1] > sup[0] * 1.1);
  CHECK(sup[2] > sup[1] * 1.1);
}

TEST_CASE("certify: the atomic factor is one-component evidence") {
  Verdict v = certify(get_entry("atomic_S").expr, light_config());
  CHECK(v.status == Verdict::Status::evidence_one_component);
  REQUIRE(v.aleksandrov.liminfs.size() == 1);
  CHECK(v.aleksandrov.liminfs[0].value < 0.5);
}
