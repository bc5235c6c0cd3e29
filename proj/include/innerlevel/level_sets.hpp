#pragma once

// Sublevel sets Omega_u(eta) = { |u| < eta } on a Whitney grid: modulus
// rasters, component labeling with quantified uncertainty, refinement
// stability verdicts, per-component diagnostics, inclusion checks between
// rasters, factor bounds along the discrete level band, and the boundary
// trace of the mask on the outermost ring.

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "innerlevel/eval.hpp"
#include "innerlevel/parallel.hpp"
#include "innerlevel/sing_set.hpp"
#include "innerlevel/whitney_grid.hpp"

namespace innerlevel {

struct ModulusRaster {
  std::shared_ptr<const WhitneyGrid> grid;
  std::vector<double> modulus;
  std::vector<double> error_bound;
  std::vector<std::uint8_t> valid;
  std::size_t invalid_count = 0;
  double eps = 0.0;
};

// Raster plus a level: mask = certainly below eta, uncertain = within the
// evaluation error (plus an optional widening) of the threshold.
struct LevelSetRaster {
  std::shared_ptr<const ModulusRaster> raster;
  double eta = 0.5;
  double widen = 0.0;
  std::vector<std::uint8_t> mask;       // modulus < eta (uncertain band included)
  std::vector<std::uint8_t> uncertain;  // |modulus - eta| <= error_bound + widen
  std::size_t masked_cells = 0;
  std::size_t certain_cells = 0;
  std::size_t uncertain_cells = 0;
};

struct ComponentRecord {
  std::size_t cell_count = 0;
  double min_modulus = std::numeric_limits<double>::infinity();
  cplx min_witness{0.0, 0.0};
  long long hole_count = 0;
  bool touches_outermost = false;
};

struct ComponentLabels {
  std::vector<std::int32_t> label;  // -1 = not a certain mask cell
  std::vector<ComponentRecord> components;
  bool uncertain_bridges = false;  // adding uncertain cells would merge components
};

// ---------------------------------------------------------------------------

inline ModulusRaster rasterize_modulus(const InnerExpr& u,
                                       std::shared_ptr<const WhitneyGrid> grid, double eps,
                                       const EvalOptions& opt = {}) {
  if (!(eps > 0.0)) throw Error("rasterize_modulus: eps must be positive");
  ModulusRaster r;
  r.grid = grid;
  r.eps = eps;
  std::size_t n = grid->cell_count();
  r.modulus.assign(n, 0.0);
  r.error_bound.assign(n, 0.0);
  r.valid.assign(n, 0);
  const auto& cells = grid->cells();
  parallel_for(n, [&](std::size_t i) {
    try {
      EvalResult e = detail::eval_disk_impl(u, cells[i].center, eps, opt);
      r.modulus[i] = std::abs(e.value);
      r.error_bound[i] = e.abs_error_bound;
      r.valid[i] = 1;
    } catch (const Error&) {
      r.valid[i] = 0;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!r.valid[i]) ++r.invalid_count;
  return r;
}

inline LevelSetRaster apply_level(std::shared_ptr<const ModulusRaster> raster, double eta,
                                  double widen = 0.0) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("apply_level: eta must lie in (0,1)");
  LevelSetRaster l;
  l.raster = std::move(raster);
  l.eta = eta;
  l.widen = widen;
  std::size_t n = l.raster->modulus.size();
  l.mask.assign(n, 0);
  l.uncertain.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!l.raster->valid[i]) continue;
    double m = l.raster->modulus[i];
    double band = l.raster->error_bound[i] + widen;
    bool unc = std::fabs(m - eta) <= band;
    bool in = m < eta || unc;
    if (in) {
      l.mask[i] = 1;
      ++l.masked_cells;
    }
    if (unc) {
      l.uncertain[i] = 1;
      ++l.uncertain_cells;
    }
  }
  l.certain_cells = l.masked_cells - l.uncertain_cells;
  return l;
}

namespace detail {

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(b)] = a;
  }
};

}  // namespace detail

// Label the connected components of the certain mask cells.  Uncertain cells
// never join or bridge components; a separate pass checks whether including
// them would merge any two labels.
inline ComponentLabels label_components(const LevelSetRaster& l) {
  const WhitneyGrid& g = *l.raster->grid;
  std::size_t n = g.cell_count();
  auto certain = [&](std::size_t i) { return l.mask[i] && !l.uncertain[i]; };

  detail::UnionFind uf(n);
  for (const auto& e : g.edges())
    if (certain(e[0]) && certain(e[1])) uf.unite(static_cast<std::int32_t>(e[0]), static_cast<std::int32_t>(e[1]));

  ComponentLabels out;
  out.label.assign(n, -1);
  std::map<std::int32_t, std::int32_t> root_to_label;
  for (std::size_t i = 0; i < n; ++i) {
    if (!certain(i)) continue;
    std::int32_t root = uf.find(static_cast<std::int32_t>(i));
    auto it = root_to_label.find(root);
    std::int32_t lab;
    if (it == root_to_label.end()) {
      lab = static_cast<std::int32_t>(out.components.size());
      root_to_label.emplace(root, lab);
      out.components.push_back({});
    } else {
      lab = it->second;
    }
    out.label[i] = lab;
    auto& rec = out.components[static_cast<std::size_t>(lab)];
    ++rec.cell_count;
    double m = l.raster->modulus[i];
    if (m < rec.min_modulus) {
      rec.min_modulus = m;
      rec.min_witness = g.cells()[i].center;
    }
    if (g.outermost(static_cast<std::uint32_t>(i))) rec.touches_outermost = true;
  }

  // exact Euler characteristic per component: holes = 1 - (V - E + F)
  std::vector<long long> E(out.components.size(), 0), F(out.components.size(), 0);
  for (const auto& e : g.edges()) {
    std::int32_t la = out.label[e[0]], lb = out.label[e[1]];
    if (la >= 0 && la == lb) ++E[static_cast<std::size_t>(la)];
  }
  for (const auto& f : g.faces()) {
    std::int32_t la = out.label[f[0]];
    if (la >= 0 && out.label[f[1]] == la && out.label[f[2]] == la) ++F[static_cast<std::size_t>(la)];
  }
  for (std::size_t c = 0; c < out.components.size(); ++c) {
    long long chi = static_cast<long long>(out.components[c].cell_count) - E[c] + F[c];
    out.components[c].hole_count = 1 - chi;
  }

  // would the uncertain band glue two components together?
  detail::UnionFind uf2(n);
  for (const auto& e : g.edges())
    if (l.mask[e[0]] && l.mask[e[1]]) uf2.unite(static_cast<std::int32_t>(e[0]), static_cast<std::int32_t>(e[1]));
  std::map<std::int32_t, std::int32_t> seen;  // uf2 root -> component label
  for (std::size_t i = 0; i < n; ++i) {
    if (out.label[i] < 0) continue;
    std::int32_t root = uf2.find(static_cast<std::int32_t>(i));
    auto it = seen.find(root);
    if (it == seen.end())
      seen.emplace(root, out.label[i]);
    else if (it->second != out.label[i])
      out.uncertain_bridges = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// connectivity across refinement levels

struct ConnectivityOptions {
  double s = kDefaultRingExponent;
  double eps = 1e-8;
  int k_stable = 3;                    // consecutive levels that must agree
  double uncertain_threshold = 0.005;  // max uncertain fraction of the mask
  bool seed_zeros = true;
  EvalOptions eval;
};

struct LevelStat {
  int level = 0;
  std::size_t components = 0;
  std::size_t masked_cells = 0;
  std::size_t certain_cells = 0;
  std::size_t uncertain_cells = 0;
  std::size_t invalid_cells = 0;
  double uncertain_fraction = 0.0;
  bool uncertain_bridges = false;
};

struct ConnectivityReport {
  double eta = 0.0;
  std::vector<LevelStat> levels;
  bool stable = false;  // component counts equal over the last k_stable levels
  enum class Verdict { connected, disconnected, inconclusive } verdict = Verdict::inconclusive;
  std::string reason;
  int k_stable = 3;
  double uncertain_threshold = 0.005;
};

inline const char* to_string(ConnectivityReport::Verdict v) {
  switch (v) {
    case ConnectivityReport::Verdict::connected: return "connected";
    case ConnectivityReport::Verdict::disconnected: return "disconnected";
    case ConnectivityReport::Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// Explicit zeros of the tree (and the grid-resolvable prefix of parametric
// zero sequences), used to seed the grid.
inline void collect_seed_zeros(const InnerExpr& u, double deepest_radius, bool negate,
                               std::vector<cplx>& out) {
  switch (u.tag()) {
    case InnerExpr::Tag::blaschke: {
      const ZeroSequence& seq = u.zeros();
      if (seq.is_finite()) {
        for (std::size_t i = 1; i <= seq.finite_count(); ++i) {
          cplx z = seq.zero(i);
          out.push_back(negate ? -z : z);
        }
      } else {
        for (std::size_t i = 1; i <= 256; ++i) {
          cplx z = seq.zero(i);
          if (std::abs(z) >= deepest_radius) break;
          out.push_back(negate ? -z : z);
        }
      }
      return;
    }
    case InnerExpr::Tag::product:
      for (const auto& f : u.factors()) collect_seed_zeros(f, deepest_radius, negate, out);
      return;
    case InnerExpr::Tag::reflect:
      collect_seed_zeros(u.child(), deepest_radius, !negate, out);
      return;
    default:
      return;  // zeros of shifts/compositions are not structural
  }
}

inline std::shared_ptr<const WhitneyGrid> grid_for(const InnerExpr& u, int L,
                                                   const ConnectivityOptions& opt) {
  std::vector<cplx> seeds;
  if (opt.seed_zeros) {
    double deepest = 1.0 - std::pow(2.0, -opt.s * static_cast<double>(L));
    collect_seed_zeros(u, deepest, false, seeds);
  }
  return std::make_shared<const WhitneyGrid>(build_grid(L, opt.s, seeds));
}

inline LevelStat level_stat_from(const LevelSetRaster& l, const ComponentLabels& labels, int L) {
  LevelStat st;
  st.level = L;
  st.components = labels.components.size();
  st.masked_cells = l.masked_cells;
  st.certain_cells = l.certain_cells;
  st.uncertain_cells = l.uncertain_cells;
  st.invalid_cells = l.raster->invalid_count;
  st.uncertain_fraction =
      l.masked_cells == 0 ? 0.0
                          : static_cast<double>(l.uncertain_cells) / static_cast<double>(l.masked_cells);
  st.uncertain_bridges = labels.uncertain_bridges;
  return st;
}

inline ConnectivityReport connectivity_verdict(double eta, std::vector<LevelStat> stats,
                                               const ConnectivityOptions& opt) {
  ConnectivityReport rep;
  rep.eta = eta;
  rep.levels = std::move(stats);
  rep.k_stable = opt.k_stable;
  rep.uncertain_threshold = opt.uncertain_threshold;
  if (rep.levels.size() < static_cast<std::size_t>(opt.k_stable)) {
    rep.verdict = ConnectivityReport::Verdict::inconclusive;
    rep.reason = "fewer levels than the stability window";
    return rep;
  }
  std::size_t tail0 = rep.levels.size() - static_cast<std::size_t>(opt.k_stable);
  bool counts_equal = true, all_one = true, all_multi = true, unc_ok = true, bridge_free = true;
  for (std::size_t i = tail0; i < rep.levels.size(); ++i) {
    const auto& st = rep.levels[i];
    if (st.components != rep.levels[tail0].components) counts_equal = false;
    if (st.components != 1) all_one = false;
    if (st.components < 2) all_multi = false;
    if (st.uncertain_fraction > opt.uncertain_threshold) unc_ok = false;
    if (st.uncertain_bridges) bridge_free = false;
  }
  rep.stable = counts_equal;
  // an empty mask at every tail level counts as (trivially) connected
  bool all_empty = true;
  for (std::size_t i = tail0; i < rep.levels.size(); ++i)
    if (rep.levels[i].masked_cells != 0) all_empty = false;
  if (all_empty) {
    rep.verdict = ConnectivityReport::Verdict::connected;
    rep.reason = "mask empty at the stability window";
    return rep;
  }
  if (counts_equal && all_one && unc_ok) {
    rep.verdict = ConnectivityReport::Verdict::connected;
    rep.reason = "single component over the stability window";
  } else if (all_multi && bridge_free && unc_ok) {
    // component counts may keep growing as deeper zeros resolve; two or more
    // separated components at every tail level is one-sided evidence
    rep.verdict = ConnectivityReport::Verdict::disconnected;
    rep.reason = "multiple non-bridged components over the stability window";
  } else {
    rep.verdict = ConnectivityReport::Verdict::inconclusive;
    rep.reason = !unc_ok ? "uncertain fraction above the threshold"
                         : (!bridge_free ? "uncertain cells could bridge components"
                                         : "component counts oscillate");
  }
  return rep;
}

// Rasters for a range of levels, computed once and shared across eta probes.
struct RasterStack {
  std::vector<int> levels;
  std::vector<std::shared_ptr<const ModulusRaster>> rasters;
};

inline RasterStack build_raster_stack(const InnerExpr& u, int L_min, int L_max,
                                      const ConnectivityOptions& opt = {}) {
  if (L_min > L_max) throw Error("build_raster_stack: empty level range");
  RasterStack st;
  for (int L = L_min; L <= L_max; ++L) {
    auto grid = grid_for(u, L, opt);
    st.levels.push_back(L);
    st.rasters.push_back(
        std::make_shared<const ModulusRaster>(rasterize_modulus(u, grid, opt.eps, opt.eval)));
  }
  return st;
}

inline ConnectivityReport connectivity_from_stack(const RasterStack& st, double eta,
                                                  const ConnectivityOptions& opt = {}) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("connectivity: eta must lie in (0,1)");
  std::vector<LevelStat> stats;
  for (std::size_t i = 0; i < st.rasters.size(); ++i) {
    LevelSetRaster l = apply_level(st.rasters[i], eta);
    ComponentLabels labels = label_components(l);
    stats.push_back(level_stat_from(l, labels, st.levels[i]));
  }
  return connectivity_verdict(eta, std::move(stats), opt);
}

inline ConnectivityReport connectivity_report(const InnerExpr& u, double eta, int L_min, int L_max,
                                              const ConnectivityOptions& opt = {}) {
  return connectivity_from_stack(build_raster_stack(u, L_min, L_max, opt), eta, opt);
}

// ---------------------------------------------------------------------------
// per-component diagnostics

struct ComponentDiagnostics {
  std::vector<ComponentRecord> components;
  double smallest_min_modulus = std::numeric_limits<double>::infinity();
  long long max_hole_count = 0;
};

inline ComponentDiagnostics component_diagnostics(const ComponentLabels& labels) {
  ComponentDiagnostics d;
  d.components = labels.components;
  for (const auto& c : labels.components) {
    d.smallest_min_modulus = std::min(d.smallest_min_modulus, c.min_modulus);
    d.max_hole_count = std::max(d.max_hole_count, c.hole_count);
  }
  return d;
}

// ---------------------------------------------------------------------------
// inclusion checks between rasters on the same grid

struct InclusionReport {
  std::size_t checked_cells = 0;
  std::size_t violations = 0;
  double max_violation_margin = 0.0;  // modulus units, both error bounds added
};

inline InclusionReport inclusion_check(const LevelSetRaster& inner, const LevelSetRaster& outer) {
  if (inner.raster->grid.get() != outer.raster->grid.get())
    throw Error("inclusion_check: rasters live on different grids");
  InclusionReport rep;
  std::size_t n = inner.mask.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!inner.raster->valid[i] || !outer.raster->valid[i]) continue;
    if (inner.uncertain[i] || outer.uncertain[i]) continue;
    if (!inner.mask[i]) continue;
    ++rep.checked_cells;
    if (!outer.mask[i]) {
      ++rep.violations;
      double margin = (outer.raster->modulus[i] - outer.eta) + inner.raster->error_bound[i] +
                      outer.raster->error_bound[i];
      rep.max_violation_margin = std::max(rep.max_violation_margin, margin);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// factor bounds along the discrete level band of |Theta| = eta

struct FactorBounds {
  double delta_hat = std::numeric_limits<double>::infinity();  // min |u| on the band
  double sigma_hat = 0.0;                                      // max |v| on the band
  std::size_t band_cells = 0;       // cells incident to a crossing edge
  std::size_t crossing_edges = 0;
  double max_modulus_gap = 0.0;     // worst |Theta| swing across a crossing edge
  bool hypothesis_eta_below_delta = false;  // eta < delta_hat with margin
  bool hypothesis_sigma_below_one = false;  // sigma_hat < 1 with margin
  double margin = 0.0;
};

// The discrete level band of { |Theta| = eta } is the set of grid edges
// whose endpoint moduli straddle eta.  The factor values on the band are
// read off by linear interpolation along each crossing edge, which keeps
// the estimates sharp even where mid-disk cells are coarse; the worst
// modulus swing across a crossing edge is the reported margin.
inline FactorBounds factor_bounds_estimate(const ModulusRaster& theta, const ModulusRaster& u,
                                           const ModulusRaster& v, double eta) {
  if (theta.grid.get() != u.grid.get() || theta.grid.get() != v.grid.get())
    throw Error("factor_bounds_estimate: rasters live on different grids");
  if (!(eta > 0.0 && eta < 1.0)) throw Error("factor_bounds_estimate: eta must lie in (0,1)");
  const WhitneyGrid& g = *theta.grid;
  FactorBounds fb;
  std::vector<std::uint8_t> in_band(g.cell_count(), 0);
  for (const auto& e : g.edges()) {
    std::uint32_t a = e[0], b = e[1];
    if (!theta.valid[a] || !theta.valid[b] || !u.valid[a] || !u.valid[b] || !v.valid[a] ||
        !v.valid[b])
      continue;
    double ma = theta.modulus[a], mb = theta.modulus[b];
    if ((ma - eta) * (mb - eta) > 0.0) continue;
    ++fb.crossing_edges;
    in_band[a] = in_band[b] = 1;
    double t = ma == mb ? 0.5 : (eta - ma) / (mb - ma);
    double ui = u.modulus[a] + t * (u.modulus[b] - u.modulus[a]);
    double vi = v.modulus[a] + t * (v.modulus[b] - v.modulus[a]);
    fb.delta_hat = std::min(fb.delta_hat, ui);
    fb.sigma_hat = std::max(fb.sigma_hat, vi);
    fb.max_modulus_gap =
        std::max(fb.max_modulus_gap,
                 std::fabs(ma - mb) + theta.error_bound[a] + theta.error_bound[b]);
  }
  for (std::uint8_t f : in_band)
    if (f) ++fb.band_cells;
  if (fb.crossing_edges == 0)
    throw Error("factor_bounds_estimate: empty level band (eta outside the raster range)");
  fb.margin = fb.max_modulus_gap;
  fb.hypothesis_eta_below_delta = eta + fb.margin < fb.delta_hat;
  fb.hypothesis_sigma_below_one = fb.sigma_hat + fb.margin < 1.0;
  return fb;
}

// ---------------------------------------------------------------------------
// bisection for the smallest eta with a connected verdict at fixed top level

struct EtaSearchResult {
  bool found = false;              // a connected eta exists in the range
  double bracket_lo = 0.0;         // largest eta with a non-connected verdict
  double bracket_hi = 0.0;         // smallest eta with a connected verdict
  ConnectivityReport::Verdict verdict_lo = ConnectivityReport::Verdict::inconclusive;
  ConnectivityReport::Verdict verdict_hi = ConnectivityReport::Verdict::inconclusive;
  bool floor_hit = false;  // connected all the way down to eta_min
  std::vector<std::pair<double, ConnectivityReport::Verdict>> probes;
};

// Monotonicity in eta (mask(eta1) subset mask(eta2) for eta1 < eta2, and for
// inner functions connectivity at eta0 persists above eta0) makes bisection
// sound up to grid noise.  Rasters are computed once per level and reused
// across the probes.
inline EtaSearchResult eta_search(const InnerExpr& u, int L, double eta_min, double eta_max,
                                  double tol_eta, const ConnectivityOptions& opt = {}) {
  if (!(eta_min > 0.0 && eta_max < 1.0 && eta_min < eta_max))
    throw Error("eta_search: need 0 < eta_min < eta_max < 1");
  if (!(tol_eta > 0.0)) throw Error("eta_search: tol_eta must be positive");
  int L_min = std::max(2, L - opt.k_stable + 1);
  RasterStack stack = build_raster_stack(u, L_min, L, opt);
  EtaSearchResult res;
  auto verdict_at = [&](double eta) {
    auto v = connectivity_from_stack(stack, eta, opt).verdict;
    res.probes.emplace_back(eta, v);
    return v;
  };

  auto hi_v = verdict_at(eta_max);
  if (hi_v != ConnectivityReport::Verdict::connected) {
    res.found = false;
    res.bracket_lo = res.bracket_hi = eta_max;
    res.verdict_lo = res.verdict_hi = hi_v;
    return res;
  }
  auto lo_v = verdict_at(eta_min);
  if (lo_v == ConnectivityReport::Verdict::connected) {
    res.found = true;
    res.floor_hit = true;
    res.bracket_lo = res.bracket_hi = eta_min;
    res.verdict_lo = res.verdict_hi = lo_v;
    return res;
  }
  double lo = eta_min, hi = eta_max;
  while (hi - lo > tol_eta) {
    double mid = 0.5 * (lo + hi);
    if (verdict_at(mid) == ConnectivityReport::Verdict::connected)
      hi = mid;
    else
      lo = mid;
  }
  res.found = true;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.verdict_lo = lo_v;
  res.verdict_hi = ConnectivityReport::Verdict::connected;
  return res;
}

// ---------------------------------------------------------------------------
// boundary trace: angular arcs where the mask reaches the outermost ring

struct BoundaryArc {
  double theta_lo = 0.0;
  double theta_hi = 0.0;  // may exceed 2*pi when the arc wraps through 0
};

inline std::vector<BoundaryArc> boundary_trace(const LevelSetRaster& l) {
  const WhitneyGrid& g = *l.raster->grid;
  int L = g.level();
  std::size_t base = g.ring_begin(L);
  std::size_t n = g.ring_size(L);
  double step = kTwoPi / static_cast<double>(n);
  std::vector<std::uint8_t> on(n, 0);
  for (std::size_t i = 0; i < n; ++i) on[i] = l.mask[base + i];
  std::vector<BoundaryArc> arcs;
  std::size_t i = 0;
  while (i < n) {
    if (!on[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && on[j + 1]) ++j;
    arcs.push_back({(static_cast<double>(i) - 0.5) * step, (static_cast<double>(j) + 0.5) * step});
    i = j + 1;
  }
  // merge a run that wraps through theta = 0
  if (arcs.size() >= 2 && on[0] && on[n - 1]) {
    arcs.front().theta_lo = arcs.back().theta_lo - kTwoPi;
    arcs.pop_back();
  }
  return arcs;
}

inline double total_arc_length(const std::vector<BoundaryArc>& arcs) {
  double s = 0.0;
  for (const auto& a : arcs) s += a.theta_hi - a.theta_lo;
  return s;
}

}  // namespace innerlevel
