#include "catch_amalgamated.hpp"
#include "innerlevel/catalog.hpp"
#include "innerlevel/eval.hpp"

using namespace innerlevel;

TEST_CASE("catalog lists unique ids and rejects unknown ones") {
  auto ids = list_entries();
  CHECK(ids.size() >= 15);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) CHECK(ids[i] != ids[j]);
  CHECK_THROWS_AS(get_entry("unknown"), Error);
  CHECK(get_entry("atomic_S").expected_status == ExpectedStatus::one_component);
  CHECK(get_entry("factorial_v").expected_status == ExpectedStatus::not_one_component);
  for (const auto& e : catalog_entries()) CHECK(!e.provenance.empty());
}

TEST_CASE("catalog expressions evaluate and stay inside the disk") {
  for (const auto& e : catalog_entries()) {
    EvalResult r = eval_disk(e.expr, UnitDiskPoint(cplx(0.3, 0.2)), 1e-9);
    CHECK(std::abs(r.value) < 1.0 + 1e-9);
    CHECK(r.abs_error_bound <= 1e-9 + 1e-12);
  }
}

TEST_CASE("catalog singular sets match the expectations") {
  for (const auto& e : catalog_entries()) {
    SingSet s = sing_set(e.expr);
    CHECK(s.description != SingSet::Description::unresolved);
    if (e.expected_sing.description == SingSet::Description::finite) {
      CHECK(s.description == SingSet::Description::finite);
      CHECK(s.atoms.size() == e.expected_sing.points.size());
      for (const auto& p : e.expected_sing.points) CHECK(s.arc_distance_to(p.theta) < 1e-9);
    } else {
      // every expected limit point must be listed as one
      for (const auto& p : e.expected_sing.points) {
        double best = kTwoPi;
        for (const auto& q : s.accumulation_points)
          best = std::min(best, arc_distance(p.theta, q.theta));
        CHECK(best < 1e-9);
      }
    }
  }
}

TEST_CASE("the mirrored observation identity: u~ v~ = (S v^2)(S(-z) v(-z)^2)") {
  const InnerExpr& ut = get_entry("u_tilde").expr;
  const InnerExpr& vt = get_entry("v_tilde").expr;
  InnerExpr S = get_entry("atomic_S").expr;
  InnerExpr v = get_entry("factorial_v").expr;
  InnerExpr lhs = product(ut, vt);
  InnerExpr rhs = product(product(S, product(v, v)),
                          reflect(product(S, product(v, v))));
  for (cplx z : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.05, -0.7)}) {
    cplx a = eval_disk(lhs, UnitDiskPoint(z), 1e-11).value;
    cplx b = eval_disk(rhs, UnitDiskPoint(z), 1e-11).value;
    CHECK(std::abs(a - b) < 1e-9);
  }
}
