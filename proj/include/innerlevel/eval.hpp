#pragma once

// Evaluation of inner-function expression trees: interior values with
// truncation error bounds, nontangential boundary values, and first/second
// derivatives ("jets") on and off the circle.
//
// Infinite Blaschke products are truncated with the factor estimate
//   |1 - b_a(z)| = (1-|a|) |a + z|a|| / (|a| |1 - conj(a) z|)
//                <= 2 (1-|a|) / (1-|z|)            (interior)
//                <= 2 (1-|a|) / |xi - a|           (|xi| = 1)
// and the telescoping bound |1 - prod b_j| <= sum |1 - b_j| (valid because
// every |b_j| <= 1 on the closed disk), so a partial product of depth N is
// off by at most (2/(1-|z|)) * tail_bound(N).

#include <algorithm>
#include <vector>

#include "innerlevel/disk_geometry.hpp"
#include "innerlevel/inner_expr.hpp"

namespace innerlevel {

struct EvalResult {
  cplx value{0.0, 0.0};
  double abs_error_bound = 0.0;
};

// Value and first two complex derivatives at one point.
struct Jet {
  cplx f{0.0, 0.0};
  cplx d1{0.0, 0.0};
  cplx d2{0.0, 0.0};
};

struct EvalOptions {
  double exclusion_radius = 1e-3;   // arc guard around singular points
  std::size_t max_depth = 1u << 20;  // truncation cap for infinite products
};

namespace detail {

inline Jet jet_one() { return {cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)}; }

inline Jet jet_mul(const Jet& x, const Jet& y) {
  return {x.f * y.f, x.d1 * y.f + x.f * y.d1, x.d2 * y.f + 2.0 * x.d1 * y.d1 + x.f * y.d2};
}

// outer jet taken at inner.f
inline Jet jet_chain(const Jet& outer, const Jet& inner) {
  return {outer.f, outer.d1 * inner.d1, outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2};
}

// Normalized Blaschke factor b_a(z) = (|a|/a)(a-z)/(1-conj(a)z); a = 0 gives
// the plain factor z.  Parametric zeros that double-round to |a| = 1
// degenerate to the constant 1 (their true contribution is below roundoff).
inline Jet blaschke_factor_jet(cplx a, cplx z) {
  double am = std::abs(a);
  if (am == 0.0) return {z, cplx(1.0, 0.0), cplx(0.0, 0.0)};
  if (am >= 1.0) return jet_one();
  cplx prefactor = cplx(am, 0.0) / a;
  cplx den = 1.0 - std::conj(a) * z;
  cplx f = prefactor * (a - z) / den;
  cplx d1 = -prefactor * (1.0 - am * am) / (den * den);
  cplx d2 = d1 * (2.0 * std::conj(a) / den);
  return {f, d1, d2};
}

// One atom of S_mu: exp(-c (zeta + z)/(zeta - z)).
inline Jet singular_atom_jet(BoundaryPoint atom, double c, cplx z) {
  cplx zeta = atom.point();
  cplx den = zeta - z;
  cplx f = std::exp(-c * (zeta + z) / den);
  cplx g1 = -2.0 * c * zeta / (den * den);
  cplx g2 = -4.0 * c * zeta / (den * den * den);
  return {f, g1 * f, (g2 + g1 * g1) * f};
}

// The same atom evaluated exactly on the circle.  There the exponent is
// purely imaginary, -c (zeta+xi)/(zeta-xi) = i c cot(delta/2) with
// delta = alpha - theta, and zeta - xi = 2i sin(delta/2) e^{i(alpha+theta)/2},
// which sidesteps the catastrophic cancellation of the cartesian difference
// close to the atom.
inline Jet singular_atom_jet_boundary(BoundaryPoint atom, double c, BoundaryPoint xi) {
  double alpha = atom.theta, theta = xi.theta;
  double delta = alpha - theta;
  if (arc_distance(alpha, theta) == 0.0)
    throw SingularProximityError("singular factor evaluated at its atom", alpha);
  double s = std::sin(0.5 * delta);
  cplx f = std::polar(1.0, c * std::cos(0.5 * delta) / s);
  cplx g1 = (c / (2.0 * s * s)) * std::polar(1.0, -theta);
  cplx g2 = cplx(0.0, -1.0) * (c / (2.0 * s * s * s)) *
            std::polar(1.0, -(alpha + 3.0 * theta) / 2.0);
  return {f, g1 * f, (g2 + g1 * g1) * f};
}

inline bool jets_close(const Jet& a, const Jet& b, double tol) {
  auto ok = [tol](cplx x, cplx y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); };
  return ok(a.f, b.f) && ok(a.d1, b.d1) && ok(a.d2, b.d2);
}

}  // namespace detail

// Smallest N whose truncated tail satisfies the interior bound
// (2/(1-|z|)) * tail_bound(N) <= eps.  For explicit lists this is the list
// length (there is no tail).
inline std::size_t truncation_depth(const ZeroSequence& seq, UnitDiskPoint z, double eps,
                                    const EvalOptions& opt = {}) {
  if (!(eps > 0.0)) throw Error("truncation_depth: eps must be positive");
  if (seq.is_finite()) return seq.finite_count();
  double budget = eps * (1.0 - std::abs(z.z)) / 2.0;
  if (seq.tail_bound(0) <= budget) return 0;
  std::size_t hi = 1;
  while (seq.tail_bound(hi) > budget) {
    if (hi >= opt.max_depth) {
      // report how deep the bound would have to go
      long long est = static_cast<long long>(hi);
      while (est < (1ll << 40) && seq.tail_bound(static_cast<std::size_t>(est)) > budget) est *= 2;
      throw DepthError("truncation_depth: tolerance unreachable at configured max depth", est);
    }
    hi *= 2;
  }
  std::size_t lo = hi / 2;
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (seq.tail_bound(mid) <= budget)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace detail {

// Smallest N with  2 * tail_bound(N) / tail_min_distance(N) <= eps  at a
// boundary point.  The distance bound grows as the tail shrinks, so doubling
// terminates whenever xi is separated from the accumulation set.
inline std::size_t boundary_depth(const ZeroSequence& seq, BoundaryPoint xi, double eps,
                                  const EvalOptions& opt) {
  if (seq.is_finite()) return seq.finite_count();
  std::size_t N = 16;
  while (true) {
    double d = seq.tail_min_distance(xi, N);
    if (d > 0.0 && 2.0 * seq.tail_bound(N) / d <= eps) return N;
    if (N >= opt.max_depth)
      throw DepthError("boundary evaluation: tolerance unreachable at configured max depth",
                       static_cast<long long>(N) * 2);
    N *= 2;
  }
}

struct BlaschkePartial {
  const ZeroSequence* seq;
  cplx z;
  Jet acc = jet_one();
  std::size_t next = 1;
  std::size_t limit;  // surviving count for finite lists, SIZE_MAX otherwise

  BlaschkePartial(const ZeroSequence& s, cplx point)
      : seq(&s), z(point), limit(s.is_finite() ? s.finite_count() : SIZE_MAX) {}

  void extend_to(std::size_t N) {
    N = std::min(N, limit);
    for (; next <= N; ++next) acc = jet_mul(acc, blaschke_factor_jet(seq->zero(next), z));
  }
};

// Partial-product jet of a (possibly infinite) Blaschke product, deepened
// until two consecutive doublings agree to tol componentwise.
inline Jet blaschke_jet_adaptive(const ZeroSequence& seq, cplx z, bool on_boundary,
                                 BoundaryPoint xi, double eps, const EvalOptions& opt) {
  BlaschkePartial partial(seq, z);
  if (seq.is_finite()) {
    partial.extend_to(partial.limit);
    return partial.acc;
  }
  double tol = std::max(eps, 1e-11);
  std::size_t N = on_boundary
                      ? boundary_depth(seq, xi, std::min(eps, 1e-10), opt)
                      : truncation_depth(seq, UnitDiskPoint(z), std::min(eps, 1e-10), opt);
  N = std::max<std::size_t>(N, 8);
  partial.extend_to(N);
  Jet prev = partial.acc;
  while (true) {
    if (N >= opt.max_depth)
      throw DepthError("blaschke jet: tolerance unreachable at configured max depth",
                       static_cast<long long>(N) * 2);
    N *= 2;
    partial.extend_to(N);
    if (jets_close(prev, partial.acc, tol)) return partial.acc;
    prev = partial.acc;
  }
}

inline void gate_blaschke(const ZeroSequence& seq, BoundaryPoint xi, const EvalOptions& opt) {
  for (const auto& p : seq.accumulation_points())
    if (arc_distance(xi.theta, p.theta) < opt.exclusion_radius)
      throw SingularProximityError("boundary point too close to zero accumulation", p.theta);
}

inline void gate_singular(const AtomicSingularMeasure& mu, BoundaryPoint xi,
                          const EvalOptions& opt) {
  for (const auto& atom : mu.atoms)
    if (arc_distance(xi.theta, atom.zeta.theta) < opt.exclusion_radius)
      throw SingularProximityError("boundary point too close to a singular atom",
                                   atom.zeta.theta);
}

// ---------------------------------------------------------------------------
// interior values with error bounds

// values inside compose chains may round onto the circle; pull them back
// just inside the guard and account for the shift in the error bound
inline cplx clamp_into_disk(cplx w) {
  double m = std::abs(w);
  double cap = 1.0 - 2.0 * kBoundaryGuard;
  if (m <= cap) return w;
  return w * (cap / m);
}

inline EvalResult eval_disk_impl(const InnerExpr& u, cplx z, double eps, const EvalOptions& opt);

inline Jet jet_impl(const InnerExpr& u, cplx z, bool on_boundary, BoundaryPoint xi, double eps,
                    const EvalOptions& opt);

inline EvalResult eval_disk_impl(const InnerExpr& u, cplx z, double eps, const EvalOptions& opt) {
  switch (u.tag()) {
    case InnerExpr::Tag::blaschke: {
      const ZeroSequence& seq = u.zeros();
      if (seq.is_finite()) {
        Jet j = jet_one();
        std::size_t n = seq.finite_count();
        for (std::size_t i = 1; i <= n; ++i) j = jet_mul(j, blaschke_factor_jet(seq.zero(i), z));
        return {j.f, kRoundoffSlack};
      }
      std::size_t N = truncation_depth(seq, UnitDiskPoint(z), eps, opt);
      cplx v(1.0, 0.0);
      for (std::size_t i = 1; i <= N; ++i) v *= blaschke_factor_jet(seq.zero(i), z).f;
      double bound = std::min(eps, 2.0 * seq.tail_bound(N) / (1.0 - std::abs(z)));
      return {v, bound + kRoundoffSlack};
    }
    case InnerExpr::Tag::singular: {
      cplx v(1.0, 0.0);
      for (const auto& atom : u.measure().atoms)
        v *= singular_atom_jet(atom.zeta, atom.weight, z).f;
      return {v, kRoundoffSlack};
    }
    case InnerExpr::Tag::identity:
      return {z, kRoundoffSlack};
    case InnerExpr::Tag::unimodular:
      return {std::polar(1.0, u.unimodular_theta()), kRoundoffSlack};
    case InnerExpr::Tag::product: {
      const auto& fs = u.factors();
      double child_eps = eps / (2.0 * static_cast<double>(fs.size()));
      cplx v(1.0, 0.0);
      double bsum = 0.0;
      for (const auto& f : fs) {
        EvalResult r = eval_disk_impl(f, z, child_eps, opt);
        v *= r.value;
        bsum += r.abs_error_bound;
      }
      return {v, bsum * 1.000001 + kRoundoffSlack};
    }
    case InnerExpr::Tag::compose: {
      // split the tolerance using one derivative sample of the outer factor
      EvalResult probe = eval_disk_impl(u.inner(), z, std::min(1e-6, eps), opt);
      double lip = 50.0;  // fallback gives eps_inner = eps/100
      cplx w_probe = clamp_into_disk(probe.value);
      try {
        Jet oj = jet_impl(u.outer(), w_probe, false, BoundaryPoint(), 1e-6, opt);
        lip = std::max(0.5, 1.5 * std::abs(oj.d1));
      } catch (const Error&) {
      }
      double eps_inner = eps / (2.0 * lip);
      EvalResult w = probe.abs_error_bound <= eps_inner
                         ? probe
                         : eval_disk_impl(u.inner(), z, eps_inner, opt);
      cplx wz = clamp_into_disk(w.value);
      double clamp_err = std::abs(wz - w.value);
      EvalResult r = eval_disk_impl(u.outer(), wz, eps / 2.0, opt);
      return {r.value,
              r.abs_error_bound + lip * (w.abs_error_bound + clamp_err) + kRoundoffSlack};
    }
    case InnerExpr::Tag::mobius_shift: {
      cplx a = u.shift_parameter();
      double lip = (1.0 + std::abs(a)) / (1.0 - std::abs(a));
      EvalResult w = eval_disk_impl(u.child(), z, eps / (2.0 * lip), opt);
      return {mobius_eval(a, w.value), lip * w.abs_error_bound + kRoundoffSlack};
    }
    case InnerExpr::Tag::reflect:
      return eval_disk_impl(u.child(), -z, eps, opt);
  }
  throw Error("eval_disk: bad node");
}

// ---------------------------------------------------------------------------
// boundary values

inline cplx eval_boundary_impl(const InnerExpr& u, BoundaryPoint xi, double eps,
                               const EvalOptions& opt) {
  cplx p = xi.point();
  switch (u.tag()) {
    case InnerExpr::Tag::blaschke: {
      const ZeroSequence& seq = u.zeros();
      gate_blaschke(seq, xi, opt);
      std::size_t N = boundary_depth(seq, xi, eps, opt);
      if (seq.is_finite()) N = seq.finite_count();
      cplx v(1.0, 0.0);
      for (std::size_t i = 1; i <= N; ++i) v *= blaschke_factor_jet(seq.zero(i), p).f;
      return v;
    }
    case InnerExpr::Tag::singular: {
      gate_singular(u.measure(), xi, opt);
      cplx v(1.0, 0.0);
      for (const auto& atom : u.measure().atoms)
        v *= singular_atom_jet_boundary(atom.zeta, atom.weight, xi).f;
      return v;
    }
    case InnerExpr::Tag::identity:
      return p;
    case InnerExpr::Tag::unimodular:
      return std::polar(1.0, u.unimodular_theta());
    case InnerExpr::Tag::product: {
      const auto& fs = u.factors();
      cplx v(1.0, 0.0);
      for (const auto& f : fs)
        v *= eval_boundary_impl(f, xi, eps / static_cast<double>(fs.size()), opt);
      return v;
    }
    case InnerExpr::Tag::compose: {
      double lip = 50.0;
      cplx w0 = eval_boundary_impl(u.inner(), xi, std::min(1e-8, eps), opt);
      BoundaryPoint wpt(std::arg(w0));
      try {
        Jet oj = jet_impl(u.outer(), wpt.point(), true, wpt, 1e-6, opt);
        lip = std::max(0.5, 1.5 * std::abs(oj.d1));
      } catch (const SingularProximityError&) {
        throw;  // inner value itself lands in the outer exclusion zone
      } catch (const Error&) {
      }
      cplx w = eval_boundary_impl(u.inner(), xi, eps / (2.0 * lip), opt);
      return eval_boundary_impl(u.outer(), BoundaryPoint(std::arg(w)), eps / 2.0, opt);
    }
    case InnerExpr::Tag::mobius_shift:
      return mobius_eval(u.shift_parameter(),
                         eval_boundary_impl(u.child(), xi, eps / 4.0, opt));
    case InnerExpr::Tag::reflect:
      return eval_boundary_impl(u.child(), BoundaryPoint(xi.theta + kPi), eps, opt);
  }
  throw Error("eval_boundary: bad node");
}

// ---------------------------------------------------------------------------
// jets (shared by interior and boundary callers)

inline Jet jet_impl(const InnerExpr& u, cplx z, bool on_boundary, BoundaryPoint xi, double eps,
                    const EvalOptions& opt) {
  switch (u.tag()) {
    case InnerExpr::Tag::blaschke:
      if (on_boundary) gate_blaschke(u.zeros(), xi, opt);
      return blaschke_jet_adaptive(u.zeros(), z, on_boundary, xi, eps, opt);
    case InnerExpr::Tag::singular: {
      if (on_boundary) gate_singular(u.measure(), xi, opt);
      Jet j = jet_one();
      for (const auto& atom : u.measure().atoms)
        j = jet_mul(j, on_boundary ? singular_atom_jet_boundary(atom.zeta, atom.weight, xi)
                                   : singular_atom_jet(atom.zeta, atom.weight, z));
      return j;
    }
    case InnerExpr::Tag::identity:
      return {z, cplx(1.0, 0.0), cplx(0.0, 0.0)};
    case InnerExpr::Tag::unimodular:
      return {std::polar(1.0, u.unimodular_theta()), cplx(0.0, 0.0), cplx(0.0, 0.0)};
    case InnerExpr::Tag::product: {
      Jet j = jet_one();
      for (const auto& f : u.factors()) j = jet_mul(j, jet_impl(f, z, on_boundary, xi, eps, opt));
      return j;
    }
    case InnerExpr::Tag::compose: {
      Jet ji = jet_impl(u.inner(), z, on_boundary, xi, eps, opt);
      Jet jo;
      if (on_boundary) {
        BoundaryPoint wpt(std::arg(ji.f));
        jo = jet_impl(u.outer(), wpt.point(), true, wpt, eps, opt);
      } else {
        jo = jet_impl(u.outer(), clamp_into_disk(ji.f), false, BoundaryPoint(), eps, opt);
      }
      return jet_chain(jo, ji);
    }
    case InnerExpr::Tag::mobius_shift: {
      Jet ji = jet_impl(u.child(), z, on_boundary, xi, eps, opt);
      cplx a = u.shift_parameter();
      Jet jo;
      if (std::abs(a) == 0.0) {
        jo = {ji.f, cplx(1.0, 0.0), cplx(0.0, 0.0)};
      } else {
        double am = std::abs(a);
        cplx prefactor = cplx(am, 0.0) / a;
        cplx den = 1.0 - std::conj(a) * ji.f;
        jo.f = prefactor * (a - ji.f) / den;
        jo.d1 = -prefactor * (1.0 - am * am) / (den * den);
        jo.d2 = jo.d1 * (2.0 * std::conj(a) / den);
      }
      return jet_chain(jo, ji);
    }
    case InnerExpr::Tag::reflect: {
      BoundaryPoint nxi(xi.theta + kPi);
      Jet j = jet_impl(u.child(), -z, on_boundary, nxi, eps, opt);
      return {j.f, -j.d1, j.d2};
    }
  }
  throw Error("jet: bad node");
}

}  // namespace detail

// u(z) with |value - u(z)| <= abs_error_bound <= eps (truncation error;
// floating roundoff is reported via a fixed slack term).
inline EvalResult eval_disk(const InnerExpr& u, UnitDiskPoint z, double eps,
                            const EvalOptions& opt = {}) {
  if (!(eps > 0.0)) throw Error("eval_disk: eps must be positive");
  return detail::eval_disk_impl(u, z.z, eps, opt);
}

// Nontangential boundary value at xi; requires xi to sit at arc distance at
// least opt.exclusion_radius from the singular set of u.
inline cplx eval_boundary(const InnerExpr& u, BoundaryPoint xi, double eps,
                          const EvalOptions& opt = {}) {
  if (!(eps > 0.0)) throw Error("eval_boundary: eps must be positive");
  return detail::eval_boundary_impl(u, xi, eps, opt);
}

// Value and first two derivatives at a boundary point.
inline Jet boundary_jet(const InnerExpr& u, BoundaryPoint xi, double eps,
                        const EvalOptions& opt = {}) {
  return detail::jet_impl(u, xi.point(), true, xi, eps, opt);
}

// Value and first two derivatives at an interior point.
inline Jet interior_jet(const InnerExpr& u, UnitDiskPoint z, double eps,
                        const EvalOptions& opt = {}) {
  return detail::jet_impl(u, z.z, false, BoundaryPoint(), eps, opt);
}

// Analytic derivative of the expression tree on the circle.
inline cplx boundary_derivative(const InnerExpr& u, BoundaryPoint xi, int order, double eps,
                                const EvalOptions& opt = {}) {
  if (order != 1 && order != 2) throw Error("boundary_derivative: order must be 1 or 2");
  Jet j = boundary_jet(u, xi, eps, opt);
  return order == 1 ? j.d1 : j.d2;
}

// |B'(xi)| as the convergent series  sum_n (1-|a_n|^2)/|a_n - xi|^2.
inline double blaschke_boundary_derivative_modulus(const ZeroSequence& seq, BoundaryPoint xi,
                                                   double eps, const EvalOptions& opt = {}) {
  if (!(eps > 0.0)) throw Error("blaschke_boundary_derivative_modulus: eps must be positive");
  detail::gate_blaschke(seq, xi, opt);
  cplx p = xi.point();
  auto term = [&](std::size_t n) {
    cplx a = seq.zero(n);
    double am = std::abs(a);
    if (am >= 1.0) return 0.0;  // double-rounded tail zero
    double d2 = std::norm(a - p);
    return (1.0 - am * am) / d2;
  };
  if (seq.is_finite()) {
    double s = 0.0;
    for (std::size_t n = 1; n <= seq.finite_count(); ++n) s += term(n);
    return s;
  }
  // partial sums with tail <= 2 tail_bound(N) / d(N)^2
  std::size_t N = 16;
  while (true) {
    double d = seq.tail_min_distance(xi, N);
    if (d > 0.0 && 2.0 * seq.tail_bound(N) / (d * d) <= eps) break;
    if (N >= opt.max_depth)
      throw DepthError("derivative series: tolerance unreachable at configured max depth",
                       static_cast<long long>(N) * 2);
    N *= 2;
  }
  double s = 0.0;
  for (std::size_t n = 1; n <= N; ++n) s += term(n);
  return s;
}

struct ComposeRatio {
  cplx via_decomposition{0.0, 0.0};  // u''∘v/(u'∘v)^2 + (1/(u'∘v)) v''/v'^2
  cplx via_composed_tree{0.0, 0.0};  // (u∘v)''/[(u∘v)']^2 from the joined tree
};

// The derivative ratio A = (u∘v)''/[(u∘v)']^2 computed two independent ways.
inline ComposeRatio compose_ratio_A(const InnerExpr& u, const InnerExpr& v, BoundaryPoint zeta,
                                    double eps, const EvalOptions& opt = {}) {
  Jet jv = boundary_jet(v, zeta, eps, opt);
  BoundaryPoint wpt(std::arg(jv.f));
  Jet ju = boundary_jet(u, wpt, eps, opt);
  if (std::abs(ju.d1) < 1e-300 || std::abs(jv.d1) < 1e-300)
    throw Error("compose_ratio_A: first derivative vanishes at the sample");
  ComposeRatio r;
  r.via_decomposition = ju.d2 / (ju.d1 * ju.d1) + (1.0 / ju.d1) * (jv.d2 / (jv.d1 * jv.d1));
  Jet jc = boundary_jet(compose(u, v), zeta, eps, opt);
  if (std::abs(jc.d1) < 1e-300)
    throw Error("compose_ratio_A: composed first derivative vanishes at the sample");
  r.via_composed_tree = jc.d2 / (jc.d1 * jc.d1);
  return r;
}

}  // namespace innerlevel
