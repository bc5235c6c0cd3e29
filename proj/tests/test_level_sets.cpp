#include "catch_amalgamated.hpp"
#include "innerlevel/catalog.hpp"
#include "innerlevel/level_sets.hpp"

using namespace innerlevel;

namespace {

InnerExpr z_pow(int k) {
  return InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), k}}));
}

std::shared_ptr<const ModulusRaster> raster_of(const InnerExpr& u, int L, double s = 1.0,
                                               double eps = 1e-10) {
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(L, s));
  return std::make_shared<const ModulusRaster>(rasterize_modulus(u, grid, eps));
}

}  // namespace

TEST_CASE("build_grid ring structure") {
  WhitneyGrid g = build_grid(2, 1.0);
  REQUIRE(g.ring_radii().size() == 3);
  CHECK(g.ring_radii()[0] == 0.0);
  CHECK(g.ring_radii()[1] == Catch::Approx(0.5));
  CHECK(g.ring_radii()[2] == Catch::Approx(0.75));
  // angular step halves ring to ring
  CHECK(g.ring_size(2) == 2 * g.ring_size(1));

  WhitneyGrid gh = build_grid(2, 0.5);
  CHECK(gh.ring_radii()[1] == Catch::Approx(1.0 - std::pow(2.0, -0.5)));
  CHECK(gh.ring_radii()[2] == Catch::Approx(0.5));
}

TEST_CASE("build_grid structural audit") {
  WhitneyGrid g = build_grid(6, 1.0);
  // every cell diameter obeys the Whitney bound
  for (const auto& c : g.cells())
    CHECK(c.diameter <= 2.0 * (1.0 - std::abs(c.center)) + 1e-12);
  // the triangulated disk has Euler characteristic 1
  long long V = static_cast<long long>(g.cell_count());
  long long E = static_cast<long long>(g.edges().size());
  long long F = static_cast<long long>(g.faces().size());
  CHECK(V - E + F == 1);
  // adjacency is symmetric by construction; spot check through the CSR
  for (std::uint32_t c = 0; c < g.cell_count(); c += 7) {
    auto [b, e] = g.neighbors(c);
    for (const std::uint32_t* p = b; p != e; ++p) {
      auto [b2, e2] = g.neighbors(*p);
      bool back = false;
      for (const std::uint32_t* q = b2; q != e2; ++q)
        if (*q == c) back = true;
      CHECK(back);
    }
  }
  CHECK_THROWS_AS(build_grid(1, 1.0), Error);
  CHECK_THROWS_AS(build_grid(40, 1.0), Error);  // cell-count guard
}

TEST_CASE("seeded grids keep the Euler characteristic") {
  std::vector<cplx> seeds = {cplx(0.31, 0.17), cplx(-0.62, 0.05), cplx(0.9, 0.0),
                             cplx(0.905, 0.001)};
  WhitneyGrid g = build_grid(6, 1.0, seeds);
  CHECK(g.seed_count() >= 3);
  long long V = static_cast<long long>(g.cell_count());
  long long E = static_cast<long long>(g.edges().size());
  long long F = static_cast<long long>(g.faces().size());
  CHECK(V - E + F == 1);
}

TEST_CASE("rasterize_modulus on the identity and powers") {
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(5, 1.0));
  ModulusRaster r1 = rasterize_modulus(InnerExpr::identity(), grid, 1e-12);
  ModulusRaster r2 = rasterize_modulus(z_pow(2), grid, 1e-12);
  for (std::size_t i = 0; i < grid->cell_count(); ++i) {
    double m = std::abs(grid->cells()[i].center);
    CHECK(r1.modulus[i] == Catch::Approx(m).margin(1e-13));
    CHECK(r2.modulus[i] == Catch::Approx(m * m).margin(1e-13));
  }
  ModulusRaster rs = rasterize_modulus(get_entry("atomic_S").expr, grid, 1e-12);
  CHECK(rs.modulus[0] == Catch::Approx(std::exp(-1.0)).margin(1e-13));
}

TEST_CASE("rasterize marks and counts cells whose evaluation fails") {
  // a tiny depth cap makes deep cells unevaluable for a slowly-converging
  // product, which must surface as invalid cells rather than an exception
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(8, 1.0));
  EvalOptions ev;
  ev.max_depth = 64;
  ModulusRaster r =
      rasterize_modulus(InnerExpr::blaschke(ZeroSequence::geometric(0.7)), grid, 1e-8, ev);
  CHECK(r.invalid_count > 0);
  CHECK(r.invalid_count < grid->cell_count());
  for (std::size_t i = 0; i < grid->cell_count(); ++i)
    if (!r.valid[i]) CHECK(std::abs(grid->cells()[i].center) > 0.5);
}

TEST_CASE("mask monotonicity in eta") {
  auto raster = raster_of(get_entry("theta_Sv").expr, 8);
  LevelSetRaster a = apply_level(raster, 0.3);
  LevelSetRaster b = apply_level(raster, 0.6);
  for (std::size_t i = 0; i < a.mask.size(); ++i)
    if (a.mask[i] && !a.uncertain[i]) CHECK(b.mask[i]);
}

TEST_CASE("connectivity: z^2 is connected at eta 0.5 with one component per level") {
  ConnectivityReport rep = connectivity_report(z_pow(2), 0.5, 4, 8);
  CHECK(rep.verdict == ConnectivityReport::Verdict::connected);
  CHECK(rep.stable);
  for (const auto& st : rep.levels) CHECK(st.components == 1);
}

TEST_CASE("connectivity: atomic singular factor is connected at eta 0.5") {
  ConnectivityReport rep = connectivity_report(get_entry("atomic_S").expr, 0.5, 6, 10);
  CHECK(rep.verdict == ConnectivityReport::Verdict::connected);
}

TEST_CASE("connectivity: factorial thin product splits at small eta") {
  // The sublevel set of the thin product splits around its zeros once the
  // neck values between consecutive zeros exceed eta; the necks are about
  // 0.048, 0.051, 0.068, 0.094, ... so eta = 0.04 separates every resolvable
  // pair once the grid resolves the zeros.
  ConnectivityReport rep =
      connectivity_report(get_entry("factorial_v").expr, 0.04, 8, 10);
  CHECK(rep.verdict == ConnectivityReport::Verdict::disconnected);
  for (const auto& st : rep.levels) CHECK(st.components >= 2);
}

TEST_CASE("component diagnostics: zeros pull the minimum down, no holes") {
  auto raster = raster_of(z_pow(2), 8);
  ComponentLabels labels = label_components(apply_level(raster, 0.25));
  REQUIRE(labels.components.size() == 1);
  CHECK(labels.components[0].min_modulus < 1e-12);  // the double zero at 0
  CHECK(labels.components[0].hole_count == 0);
  CHECK_FALSE(labels.components[0].touches_outermost);

  auto rb = raster_of(InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}})), 8);
  ComponentLabels lb = label_components(apply_level(rb, 0.3));
  REQUIRE(lb.components.size() == 1);
  CHECK(lb.components[0].min_modulus < 0.02);
  CHECK(lb.components[0].hole_count == 0);
}

TEST_CASE("component diagnostics: the S component hugs its atom as L grows") {
  double prev_min = 1.0;
  for (int L : {6, 8, 10}) {
    auto raster = raster_of(get_entry("atomic_S").expr, L);
    ComponentLabels labels = label_components(apply_level(raster, 0.5));
    REQUIRE(labels.components.size() == 1);
    CHECK(labels.components[0].min_modulus <= prev_min + 1e-12);
    prev_min = labels.components[0].min_modulus;
  }
  CHECK(prev_min < 1e-6);
}

TEST_CASE("inclusion: sublevel set of a factor sits inside the product's") {
  const InnerExpr& theta = get_entry("theta_Sv").expr;
  InnerExpr v = get_entry("factorial_v").expr;
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(9, 1.0));
  auto rt = std::make_shared<const ModulusRaster>(rasterize_modulus(theta, grid, 1e-10));
  auto rv = std::make_shared<const ModulusRaster>(rasterize_modulus(v, grid, 1e-10));
  // |v| < eta implies |theta| = |S||v| < eta
  InclusionReport rep = inclusion_check(apply_level(rv, 0.5), apply_level(rt, 0.5));
  CHECK(rep.violations == 0);
  CHECK(rep.checked_cells > 100);

  auto other = std::make_shared<const WhitneyGrid>(build_grid(8, 1.0));
  auto ro = std::make_shared<const ModulusRaster>(rasterize_modulus(v, other, 1e-10));
  CHECK_THROWS_AS(inclusion_check(apply_level(ro, 0.5), apply_level(rt, 0.5)), Error);
}

TEST_CASE("cellwise product inclusions from the definitions") {
  const InnerExpr& u = get_entry("atomic_S").expr;
  InnerExpr v = get_entry("geometric_b").expr;
  InnerExpr uv = product(u, v);
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(9, 1.0));
  ModulusRaster ru = rasterize_modulus(u, grid, 1e-10);
  ModulusRaster rv = rasterize_modulus(v, grid, 1e-10);
  ModulusRaster ruv = rasterize_modulus(uv, grid, 1e-10);
  double eta = 0.6;
  for (std::size_t i = 0; i < grid->cell_count(); ++i) {
    if (!ru.valid[i] || !rv.valid[i] || !ruv.valid[i]) continue;
    // |u| < eta or |v| < eta implies |uv| < eta (cell-certain direction)
    if (std::min(ru.modulus[i], rv.modulus[i]) < eta - 1e-8)
      CHECK(ruv.modulus[i] < eta + 1e-8);
    // |uv| < eta^2 implies |u| < eta or |v| < eta
    if (ruv.modulus[i] < eta * eta - 1e-8)
      CHECK((ru.modulus[i] < eta + 1e-8 || rv.modulus[i] < eta + 1e-8));
  }
}

TEST_CASE("factor bounds: equal factors sit at sqrt(eta) on the band") {
  InnerExpr u = InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}}));
  InnerExpr theta = product(u, u);
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(9, 1.0));
  auto rt = rasterize_modulus(theta, grid, 1e-10);
  auto ru = rasterize_modulus(u, grid, 1e-10);
  double eta = 0.3;
  FactorBounds fb = factor_bounds_estimate(rt, ru, ru, eta);
  double root = std::sqrt(eta);
  CHECK(fb.delta_hat == Catch::Approx(root).margin(0.02));
  CHECK(fb.sigma_hat == Catch::Approx(root).margin(0.02));
  CHECK(fb.band_cells > 10);
  CHECK_THROWS_AS(factor_bounds_estimate(rt, ru, ru, 0.999999), Error);
}

TEST_CASE("factor bounds: splitting one Moebius factor off a product") {
  InnerExpr phi = InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}}));
  InnerExpr psi = InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(-0.5, 0.0), 1}}));
  InnerExpr theta = product(phi, psi);
  auto grid = std::make_shared<const WhitneyGrid>(build_grid(9, 1.0));
  auto rt = rasterize_modulus(theta, grid, 1e-10);
  auto ru = rasterize_modulus(phi, grid, 1e-10);
  auto rv = rasterize_modulus(psi, grid, 1e-10);
  FactorBounds fb = factor_bounds_estimate(rt, ru, rv, 0.3);
  // delta_hat = min |phi| over the band must stay above eta (the split-off
  // hypothesis) for this pair
  CHECK(fb.delta_hat > 0.3);
  CHECK(fb.delta_hat < 1.0);
}

TEST_CASE("eta_search: the identity connects at every eta, floor bracket") {
  EtaSearchResult res = eta_search(InnerExpr::identity(), 8, 0.05, 0.9, 0.01);
  CHECK(res.found);
  CHECK(res.floor_hit);
}

TEST_CASE("eta_search: atomic singular factor connects from the floor") {
  EtaSearchResult res = eta_search(get_entry("atomic_S").expr, 9, 0.1, 0.9, 0.01);
  CHECK(res.found);
  CHECK(res.floor_hit);
}

TEST_CASE("eta_search: factorial thin product has a positive threshold at L=10") {
  // Grid evidence can only see separations down to the resolvable zero
  // scale; at L = 10 the smallest eta with a connected verdict sits near the
  // deepest resolvable neck (~0.1-0.2), far below the search ceiling.
  EtaSearchResult res = eta_search(get_entry("factorial_v").expr, 10, 0.02, 0.9, 0.02);
  CHECK(res.found);
  CHECK_FALSE(res.floor_hit);
  CHECK(res.bracket_lo >= 0.02);
  CHECK(res.bracket_hi <= 0.5);
}

TEST_CASE("boundary trace: interior level sets leave no trace") {
  auto raster = raster_of(z_pow(2), 8);
  auto arcs = boundary_trace(apply_level(raster, 0.5));
  CHECK(arcs.empty());
}

TEST_CASE("boundary trace: the S arc shrinks toward the atom") {
  double prev = kTwoPi;
  for (int L : {8, 10, 12}) {
    auto raster = raster_of(get_entry("atomic_S").expr, L, kDefaultRingExponent, 1e-8);
    auto arcs = boundary_trace(apply_level(raster, 0.5));
    REQUIRE(arcs.size() == 1);
    // the arc straddles theta = 0
    CHECK(arcs[0].theta_lo < 0.0);
    CHECK(arcs[0].theta_hi > 0.0);
    double len = total_arc_length(arcs);
    CHECK(len < prev);
    prev = len;
  }
}

TEST_CASE("boundary trace: composed function clusters at the preimage set") {
  const InnerExpr& u = get_entry("b_compose_S").expr;
  auto raster = raster_of(u, 10, kDefaultRingExponent, 1e-8);
  auto arcs = boundary_trace(apply_level(raster, 0.5));
  CHECK(arcs.size() >= 3);  // several preimage arcs plus the accumulation end
  SingSet sing = sing_set(u);
  // every arc midpoint is close to some singular point of u
  for (const auto& a : arcs) {
    double mid = normalize_angle(0.5 * (a.theta_lo + a.theta_hi));
    CHECK(sing.arc_distance_to(mid) < 0.2);
  }
}
