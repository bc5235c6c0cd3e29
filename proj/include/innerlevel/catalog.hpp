#pragma once

// Named constructions used as fixtures throughout the tests and the CLI:
// atomic singular factors, geometric and factorial-thin Blaschke products,
// their mirrored variants, and the composition examples.

#include <string>
#include <vector>

#include "innerlevel/sing_set.hpp"

namespace innerlevel {

enum class ExpectedStatus { one_component, not_one_component, unspecified };

inline const char* to_string(ExpectedStatus s) {
  switch (s) {
    case ExpectedStatus::one_component: return "one_component";
    case ExpectedStatus::not_one_component: return "not_one_component";
    case ExpectedStatus::unspecified: return "unspecified";
  }
  return "unspecified";
}

struct ExpectedSing {
  SingSet::Description description = SingSet::Description::finite;
  std::vector<BoundaryPoint> points;  // atoms or accumulation points, when finite/listed
};

struct CatalogEntry {
  std::string id;
  InnerExpr expr;
  ExpectedStatus expected_status = ExpectedStatus::unspecified;
  ExpectedSing expected_sing;
  std::string provenance;
};

namespace detail {

inline InnerExpr make_atomic_S() {
  return InnerExpr::singular({{{BoundaryPoint(0.0), 1.0}}});
}

inline InnerExpr make_finite_atoms(int N) {
  AtomicSingularMeasure mu;
  for (int j = 0; j < N; ++j)
    mu.atoms.push_back({BoundaryPoint(kTwoPi * static_cast<double>(j) / static_cast<double>(N)), 1.0});
  return InnerExpr::singular(mu);
}

inline InnerExpr make_factorial_v() { return InnerExpr::blaschke(ZeroSequence::factorial()); }

inline InnerExpr make_geometric_b() { return InnerExpr::blaschke(ZeroSequence::geometric(0.5)); }

// b(z) = v(z) v(-z), a thin product with zeros clustering at both 1 and -1
inline InnerExpr make_mirror_b() {
  return product(make_factorial_v(), reflect(make_factorial_v()));
}

inline std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> out;
  auto add = [&](std::string id, InnerExpr e, ExpectedStatus st, ExpectedSing sing,
                 std::string why) {
    out.push_back({std::move(id), std::move(e), st, std::move(sing), std::move(why)});
  };

  ExpectedSing none{SingSet::Description::finite, {}};
  ExpectedSing at_one{SingSet::Description::finite, {BoundaryPoint(0.0)}};
  ExpectedSing acc_one{SingSet::Description::countable_with_listed_accumulations,
                       {BoundaryPoint(0.0)}};
  ExpectedSing at_pm_one{SingSet::Description::countable_with_listed_accumulations,
                         {BoundaryPoint(0.0), BoundaryPoint(kPi)}};

  add("atomic_S", make_atomic_S(), ExpectedStatus::one_component, at_one,
      "single-atom singular factor exp(-(1+z)/(1-z)); level sets hug the atom at 1");
  add("finite_atoms_1", make_finite_atoms(1), ExpectedStatus::one_component, at_one,
      "one-atom singular product at the 1st root of unity");
  add("finite_atoms_2", make_finite_atoms(2), ExpectedStatus::one_component,
      ExpectedSing{SingSet::Description::finite, {BoundaryPoint(0.0), BoundaryPoint(kPi)}},
      "two-atom singular product at the square roots of unity");
  add("finite_atoms_3", make_finite_atoms(3), ExpectedStatus::one_component,
      ExpectedSing{SingSet::Description::finite,
                   {BoundaryPoint(0.0), BoundaryPoint(kTwoPi / 3.0), BoundaryPoint(2.0 * kTwoPi / 3.0)}},
      "three-atom singular product at the cube roots of unity");
  add("geometric_b", make_geometric_b(), ExpectedStatus::one_component, acc_one,
      "interpolating Blaschke product with zeros 1 - 2^-n, constant pseudohyperbolic gaps");
  add("factorial_v", make_factorial_v(), ExpectedStatus::not_one_component, acc_one,
      "thin Blaschke product with zeros 1 - 1/n!; its sublevel sets eventually split");
  add("theta_Sv", product(make_atomic_S(), make_factorial_v()), ExpectedStatus::one_component,
      acc_one, "the atomic factor times the factorial-thin product; the product is one-component"
               " while the thin factor alone is not");
  add("mirror_b", make_mirror_b(), ExpectedStatus::unspecified, at_pm_one,
      "thin product with zeros at both 1-1/n! and -(1-1/n!)");
  add("u_tilde", product(make_atomic_S(), make_mirror_b()), ExpectedStatus::not_one_component,
      at_pm_one, "S times the mirrored thin product; behaves like the thin product near -1");
  add("v_tilde", product(reflect(make_atomic_S()), make_mirror_b()),
      ExpectedStatus::not_one_component, at_pm_one,
      "reflected S times the mirrored thin product; behaves like the thin product near 1");
  add("theta_tilde",
      product(product(make_atomic_S(), make_mirror_b()),
              product(reflect(make_atomic_S()), make_mirror_b())),
      ExpectedStatus::one_component, at_pm_one,
      "product of the two mirrored halves; factors as two one-component pieces");
  add("b_compose_S", compose(make_geometric_b(), make_atomic_S()), ExpectedStatus::one_component,
      acc_one, "geometric product composed with the atomic factor; singularities at the"
               " countably many boundary solutions of S = 1, accumulating at 1");
  add("S_compose_b", compose(make_atomic_S(), make_geometric_b()), ExpectedStatus::one_component,
      acc_one, "atomic factor composed with the geometric product; a singular inner function"
               " with infinitely many singularities");
  add("finite_blaschke_1",
      InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), 1}})),
      ExpectedStatus::one_component, none, "the identity z as a degree-one Blaschke product");
  add("finite_blaschke_2",
      InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), 2}})),
      ExpectedStatus::one_component, none, "z^2; sublevel sets are round disks");
  add("finite_blaschke_3",
      InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), 3}})),
      ExpectedStatus::one_component, none, "z^3");
  add("finite_blaschke_pair",
      InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}, {cplx(-0.5, 0.0), 1}})),
      ExpectedStatus::one_component, none, "two real zeros at +-1/2");
  add("finite_blaschke_mixed",
      InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}, {cplx(-0.3, 0.4), 1}})),
      ExpectedStatus::one_component, none, "two generic zeros, one off the real axis");
  return out;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = detail::build_catalog();
  return entries;
}

inline std::vector<std::string> list_entries() {
  std::vector<std::string> ids;
  for (const auto& e : catalog_entries()) ids.push_back(e.id);
  return ids;
}

inline const CatalogEntry& get_entry(const std::string& id) {
  for (const auto& e : catalog_entries())
    if (e.id == id) return e;
  throw Error("catalog: unknown id '" + id + "'");
}

// Entries whose certification is allowed to stay inconclusive at affordable
// grid levels (the mirrored thin family).
inline bool inconclusive_allowed(const std::string& id) {
  return id == "mirror_b" || id == "u_tilde" || id == "v_tilde" || id == "theta_tilde";
}

}  // namespace innerlevel
