#pragma once

// Singular-set bookkeeping.  For Blaschke products the singular set is the
// accumulation of the zeros on the circle; for atomic singular factors it is
// the atom set; products take unions; a Moebius shift leaves it unchanged;
// for a composition u∘v it is
//     Sing(v)  union  { xi not in Sing(v) : v(xi) in Sing(u) },
// with the preimages located by sweeping the boundary argument of v.

#include <string>
#include <vector>

#include "innerlevel/eval.hpp"

namespace innerlevel {

struct SingSet {
  enum class Description { finite, countable_with_listed_accumulations, unresolved };

  std::vector<BoundaryPoint> atoms;                // isolated singular points found
  std::vector<BoundaryPoint> accumulation_points;  // limit points of the singular set
  Description description = Description::finite;

  std::size_t preimages_found = 0;  // composition sweeps only
  std::string note;                 // search-window statement for sweeps

  bool empty() const { return atoms.empty() && accumulation_points.empty(); }

  std::vector<BoundaryPoint> all_points() const {
    std::vector<BoundaryPoint> v = atoms;
    v.insert(v.end(), accumulation_points.begin(), accumulation_points.end());
    return v;
  }

  double arc_distance_to(double theta) const {
    double d = kTwoPi;
    for (const auto& p : atoms) d = std::min(d, arc_distance(theta, p.theta));
    for (const auto& p : accumulation_points) d = std::min(d, arc_distance(theta, p.theta));
    return d;
  }
};

inline const char* to_string(SingSet::Description d) {
  switch (d) {
    case SingSet::Description::finite: return "finite";
    case SingSet::Description::countable_with_listed_accumulations:
      return "countable_with_listed_accumulations";
    case SingSet::Description::unresolved: return "unresolved";
  }
  return "unresolved";
}

struct SingSetOptions {
  std::size_t sweep_grid = 1u << 16;   // boundary samples for preimage bracketing
  double exclusion_radius = 1e-3;      // skip this arc around Sing(v) while sweeping
  std::size_t max_preimages = 4096;
  double eval_eps = 1e-10;
};

namespace detail {

inline void push_point_unique(std::vector<BoundaryPoint>& v, BoundaryPoint p, double tol = 1e-9) {
  for (const auto& q : v)
    if (arc_distance(q.theta, p.theta) < tol) return;
  v.push_back(p);
}

inline void merge_points(std::vector<BoundaryPoint>& dst, const std::vector<BoundaryPoint>& src) {
  for (const auto& p : src) push_point_unique(dst, p);
}

// total multiplicity of a finite Blaschke tree, or -1 when not finite/known
inline long long finite_degree(const InnerExpr& e) {
  switch (e.tag()) {
    case InnerExpr::Tag::blaschke:
      return e.zeros().is_finite() ? static_cast<long long>(e.zeros().finite_count()) : -1;
    case InnerExpr::Tag::identity:
      return 1;
    case InnerExpr::Tag::unimodular:
      return 0;
    case InnerExpr::Tag::product: {
      long long d = 0;
      for (const auto& f : e.factors()) {
        long long c = finite_degree(f);
        if (c < 0) return -1;
        d += c;
      }
      return d;
    }
    case InnerExpr::Tag::reflect:
      return finite_degree(e.child());
    case InnerExpr::Tag::mobius_shift:
      return -1;  // shift of a finite product is finite but degree bookkeeping stops here
    case InnerExpr::Tag::compose:
    case InnerExpr::Tag::singular:
      return -1;
  }
  return -1;
}

}  // namespace detail

inline SingSet sing_set(const InnerExpr& u, const SingSetOptions& opt = {});

namespace detail {

// Solve v(e^{i theta}) = target on the swept arcs by tracking the argument
// of v between grid nodes.  Intervals where the phase moves too fast to rule
// out aliasing are subdivided; whatever remains aliased at the depth cap is
// skipped (the argument is unbounded at Sing(v), so a complete enumeration
// is impossible anyway — the note records the search window).
struct PreimageSweep {
  const InnerExpr* v;
  const std::vector<BoundaryPoint>* targets;
  const SingSetOptions* opt;
  EvalOptions ev;
  std::vector<BoundaryPoint> found;
  bool clean = true;

  cplx value_at(double theta) const {
    return eval_boundary(*v, BoundaryPoint(theta), opt->eval_eps, ev);
  }

  // one bracket with a verified small phase swing
  void bisect_bracket(double lo, double hi, cplx tgt, bool lo_positive) {
    for (int it = 0; it < 64 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      cplx vm;
      try {
        vm = value_at(mid);
      } catch (const Error&) {
        clean = false;
        return;
      }
      double am = std::arg(vm * std::conj(tgt));
      if (am == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((am > 0.0) == lo_positive)
        lo = mid;
      else
        hi = mid;
    }
    double root = 0.5 * (lo + hi);
    try {
      // residual check guards against brackets created by leftover aliasing
      double resid = std::arg(value_at(root) * std::conj(tgt));
      if (std::fabs(resid) < 1e-6) push_point_unique(found, BoundaryPoint(root));
    } catch (const Error&) {
      clean = false;
    }
  }

  void scan_interval(double t0, cplx v0, double t1, cplx v1, int depth) {
    if (found.size() >= opt->max_preimages) return;
    double dphi = std::arg(v1 / v0);
    // |dphi| near pi cannot distinguish a slow swing from an aliased fast
    // one; subdivide until the step is trustworthy
    if (std::fabs(dphi) > kPi / 2) {
      if (depth <= 0) return;  // unresolvably fast: inside the noted window
      double tm = 0.5 * (t0 + t1);
      cplx vm;
      try {
        vm = value_at(tm);
      } catch (const Error&) {
        clean = false;
        return;
      }
      scan_interval(t0, v0, tm, vm, depth - 1);
      scan_interval(tm, vm, t1, v1, depth - 1);
      return;
    }
    for (const auto& t : *targets) {
      if (found.size() >= opt->max_preimages) return;
      cplx tgt = t.point();
      double alpha = std::arg(v0 * std::conj(tgt));
      double lifted = alpha + dphi;
      // phase values near the antipode cannot cross 0 within a small step
      if (std::fabs(alpha) > 3.0) continue;
      bool crossing = (alpha > 0.0 && lifted <= 0.0) || (alpha < 0.0 && lifted >= 0.0) ||
                      alpha == 0.0;
      if (!crossing) continue;
      if (alpha == 0.0) {
        push_point_unique(found, BoundaryPoint(t0));
        continue;
      }
      bisect_bracket(t0, t1, tgt, alpha > 0.0);
    }
  }
};

inline std::vector<BoundaryPoint> boundary_preimages(const InnerExpr& v, const SingSet& sing_v,
                                                     const std::vector<BoundaryPoint>& targets,
                                                     const SingSetOptions& opt, bool& clean) {
  clean = true;
  if (targets.empty()) return {};
  const std::size_t n = opt.sweep_grid;

  PreimageSweep sweep;
  sweep.v = &v;
  sweep.targets = &targets;
  sweep.opt = &opt;
  sweep.ev.exclusion_radius = opt.exclusion_radius * 0.5;

  std::vector<double> thetas(n);
  std::vector<cplx> vals(n);
  std::vector<char> ok(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    thetas[i] = th;
    if (sing_v.arc_distance_to(th) < opt.exclusion_radius) continue;
    try {
      vals[i] = sweep.value_at(th);
      ok[i] = 1;
    } catch (const Error&) {
      sweep.clean = false;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    if (!ok[i] || !ok[j]) continue;
    double t1 = thetas[i] + kTwoPi / static_cast<double>(n);
    sweep.scan_interval(thetas[i], vals[i], t1, vals[j], 24);
  }
  clean = sweep.clean;
  std::sort(sweep.found.begin(), sweep.found.end(),
            [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.theta < b.theta; });
  return sweep.found;
}

inline SingSet sing_compose(const InnerExpr& outer, const InnerExpr& inner,
                            const SingSetOptions& opt) {
  SingSet su = sing_set(outer, opt);
  SingSet sv = sing_set(inner, opt);
  if (su.description == SingSet::Description::unresolved ||
      sv.description == SingSet::Description::unresolved) {
    SingSet out = sv;
    out.description = SingSet::Description::unresolved;
    out.note = "child singular set unresolved";
    return out;
  }
  // constants and the identity short-circuit the sweep
  if (inner.tag() == InnerExpr::Tag::identity) return su;
  if (inner.tag() == InnerExpr::Tag::unimodular || outer.tag() == InnerExpr::Tag::unimodular)
    return SingSet{};
  if (su.empty()) return sv;

  std::vector<BoundaryPoint> targets = su.all_points();
  bool clean = true;
  std::vector<BoundaryPoint> pre = boundary_preimages(inner, sv, targets, opt, clean);

  SingSet out;
  out.preimages_found = pre.size();
  out.note = "preimage sweep over " + std::to_string(opt.sweep_grid) + " nodes, excluding arcs of radius " +
             std::to_string(opt.exclusion_radius) + " around " +
             std::to_string(sv.atoms.size() + sv.accumulation_points.size()) +
             " singular points of the inner factor";

  if (sv.empty()) {
    // finite inner part: the preimage count is checkable against the degree
    out.atoms = pre;
    out.description = SingSet::Description::finite;
    long long deg = finite_degree(inner);
    if (!clean || (deg > 0 && pre.size() != static_cast<std::size_t>(deg) * targets.size())) {
      out.description = SingSet::Description::unresolved;
      out.note += "; expected " + std::to_string(deg > 0 ? static_cast<std::size_t>(deg) * targets.size() : 0) +
                  " preimages, found " + std::to_string(pre.size());
    }
    return out;
  }

  // the argument of the inner function is unbounded at each of its singular
  // points, so the preimages accumulate exactly there
  out.accumulation_points = sv.atoms;
  merge_points(out.accumulation_points, sv.accumulation_points);
  for (const auto& p : pre) {
    bool near_acc = false;
    for (const auto& q : out.accumulation_points)
      if (arc_distance(p.theta, q.theta) < 1e-9) near_acc = true;
    if (!near_acc) push_point_unique(out.atoms, p);
  }
  out.description = clean ? SingSet::Description::countable_with_listed_accumulations
                          : SingSet::Description::unresolved;
  return out;
}

}  // namespace detail

inline SingSet sing_set(const InnerExpr& u, const SingSetOptions& opt) {
  switch (u.tag()) {
    case InnerExpr::Tag::blaschke: {
      SingSet s;
      s.accumulation_points = u.zeros().accumulation_points();
      s.description = s.accumulation_points.empty()
                          ? SingSet::Description::finite
                          : SingSet::Description::countable_with_listed_accumulations;
      return s;
    }
    case InnerExpr::Tag::singular: {
      SingSet s;
      for (const auto& atom : u.measure().atoms) s.atoms.push_back(atom.zeta);
      s.description = SingSet::Description::finite;
      return s;
    }
    case InnerExpr::Tag::identity:
    case InnerExpr::Tag::unimodular:
      return SingSet{};
    case InnerExpr::Tag::product: {
      SingSet s;
      for (const auto& f : u.factors()) {
        SingSet c = sing_set(f, opt);
        detail::merge_points(s.accumulation_points, c.accumulation_points);
        detail::merge_points(s.atoms, c.atoms);
        if (c.description == SingSet::Description::unresolved)
          s.description = SingSet::Description::unresolved;
      }
      // a point that is a limit of singularities dominates its atom role
      std::vector<BoundaryPoint> atoms;
      for (const auto& a : s.atoms) {
        bool near_acc = false;
        for (const auto& q : s.accumulation_points)
          if (arc_distance(a.theta, q.theta) < 1e-12) near_acc = true;
        if (!near_acc) atoms.push_back(a);
      }
      s.atoms = std::move(atoms);
      if (s.description != SingSet::Description::unresolved)
        s.description = s.accumulation_points.empty()
                            ? SingSet::Description::finite
                            : SingSet::Description::countable_with_listed_accumulations;
      return s;
    }
    case InnerExpr::Tag::compose:
      return detail::sing_compose(u.outer(), u.inner(), opt);
    case InnerExpr::Tag::mobius_shift:
      return sing_set(u.child(), opt);  // Sing(phi_a ∘ u) = Sing(u)
    case InnerExpr::Tag::reflect: {
      SingSet c = sing_set(u.child(), opt);
      SingSet s;
      for (const auto& p : c.atoms) s.atoms.push_back(BoundaryPoint(p.theta + kPi));
      for (const auto& p : c.accumulation_points)
        s.accumulation_points.push_back(BoundaryPoint(p.theta + kPi));
      s.description = c.description;
      s.preimages_found = c.preimages_found;
      s.note = c.note;
      return s;
    }
  }
  throw Error("sing_set: bad node");
}

}  // namespace innerlevel
