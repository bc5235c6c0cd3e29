#pragma once

// Numerical evidence for the one-component criteria: the boundary supremum
// of |u''|/|u'|^2, the infimum of |u'|, radial liminf surrogates at singular
// points, and an aggregated verdict.  Everything here is sampled evidence,
// never a proof, and the verdict names say so.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "innerlevel/level_sets.hpp"

namespace innerlevel {

struct BoundarySampleSet {
  std::vector<double> thetas;
  std::size_t requested = 0;
  std::size_t skipped = 0;  // samples whose jet evaluation failed
  double exclusion_radius = 0.0;
};

// Stratified boundary samples: a power-of-two uniform grid plus dyadic
// refinement toward every singular point, truncated at the exclusion radius.
// Sample sets are nested as n grows, so sampled suprema are monotone.
inline BoundarySampleSet boundary_samples(const SingSet& sing, std::size_t n_samples,
                                          double exclusion_radius) {
  BoundarySampleSet out;
  out.requested = n_samples;
  out.exclusion_radius = exclusion_radius;
  std::size_t uniform = 16;
  while (uniform * 2 <= n_samples / 2) uniform *= 2;
  for (std::size_t i = 0; i < uniform; ++i)
    out.thetas.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(uniform));

  std::vector<BoundaryPoint> points = sing.all_points();
  if (!points.empty()) {
    // Dyadic depth grows like sqrt(budget), so successive 4x refinements
    // keep probing materially deeper toward each singularity; a per-point
    // cap keeps the total near the budget when the singular set is large.
    double deep = std::clamp(std::sqrt(static_cast<double>(n_samples)) / 2.0, 4.0, 46.0);
    double per_point = std::max(4.0, static_cast<double>(n_samples) /
                                         (20.0 * static_cast<double>(points.size())));
    int levels = static_cast<int>(std::min(deep, per_point));
    for (const auto& p : points) {
      for (int m = 2; m < 2 + levels; ++m) {
        double off = kPi * std::pow(2.0, -m);
        if (off < exclusion_radius) break;
        for (double scale : {1.0, 1.2, 1.4, 1.6, 1.8}) {
          double o = off * scale;
          if (o >= kPi) continue;
          out.thetas.push_back(normalize_angle(p.theta + o));
          out.thetas.push_back(normalize_angle(p.theta - o));
        }
      }
    }
  }
  // drop anything inside an exclusion neighborhood
  std::vector<double> kept;
  kept.reserve(out.thetas.size());
  for (double t : out.thetas)
    if (sing.arc_distance_to(t) >= exclusion_radius) kept.push_back(t);
  out.thetas = std::move(kept);
  return out;
}

struct SampledJets {
  BoundarySampleSet samples;
  std::vector<double> thetas;  // samples that evaluated cleanly
  std::vector<Jet> jets;
};

inline SampledJets sample_boundary_jets(const InnerExpr& u, const SingSet& sing,
                                        std::size_t n_samples, double exclusion_radius,
                                        double eps = 1e-10) {
  SampledJets out;
  out.samples = boundary_samples(sing, n_samples, exclusion_radius);
  EvalOptions opt;
  opt.exclusion_radius = std::min(1e-3, exclusion_radius);
  std::size_t n = out.samples.thetas.size();
  std::vector<Jet> jets(n);
  std::vector<std::uint8_t> ok(n, 0);
  parallel_for(n, [&](std::size_t i) {
    try {
      jets[i] = boundary_jet(u, BoundaryPoint(out.samples.thetas[i]), eps, opt);
      ok[i] = 1;
    } catch (const Error&) {
      ok[i] = 0;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) {
      ++out.samples.skipped;
      continue;
    }
    out.thetas.push_back(out.samples.thetas[i]);
    out.jets.push_back(jets[i]);
  }
  return out;
}

struct RatioSupResult {
  double sup = 0.0;
  double argmax_theta = 0.0;
  std::size_t samples_used = 0;
  std::size_t samples_skipped = 0;
};

// max over samples of |u''| / |u'|^2
inline RatioSupResult derivative_ratio_sup(const InnerExpr& u, std::size_t n_samples,
                                           double exclusion_radius,
                                           const std::optional<SingSet>& sing_hint = {}) {
  if (n_samples < 256) throw Error("derivative_ratio_sup: need at least 256 samples");
  SingSet sing = sing_hint ? *sing_hint : sing_set(u);
  if (sing.description == SingSet::Description::unresolved)
    throw Error("derivative_ratio_sup: singular set unresolved");
  SampledJets sj = sample_boundary_jets(u, sing, n_samples, exclusion_radius);
  RatioSupResult res;
  res.samples_used = sj.jets.size();
  res.samples_skipped = sj.samples.skipped;
  for (std::size_t i = 0; i < sj.jets.size(); ++i) {
    double d1 = std::abs(sj.jets[i].d1);
    if (d1 < 1e-300) continue;  // constants have no ratio
    double r = std::abs(sj.jets[i].d2) / (d1 * d1);
    if (r > res.sup) {
      res.sup = r;
      res.argmax_theta = sj.thetas[i];
    }
  }
  return res;
}

struct DeltaInfResult {
  double inf = std::numeric_limits<double>::infinity();
  double argmin_theta = 0.0;
  std::size_t samples_used = 0;
};

// min over samples of |u'|
inline DeltaInfResult delta_u_inf(const InnerExpr& u, std::size_t n_samples,
                                  double exclusion_radius,
                                  const std::optional<SingSet>& sing_hint = {}) {
  if (n_samples < 256) throw Error("delta_u_inf: need at least 256 samples");
  SingSet sing = sing_hint ? *sing_hint : sing_set(u);
  if (sing.description == SingSet::Description::unresolved)
    throw Error("delta_u_inf: singular set unresolved");
  SampledJets sj = sample_boundary_jets(u, sing, n_samples, exclusion_radius);
  DeltaInfResult res;
  res.samples_used = sj.jets.size();
  for (std::size_t i = 0; i < sj.jets.size(); ++i) {
    double d1 = std::abs(sj.jets[i].d1);
    if (d1 < res.inf) {
      res.inf = d1;
      res.argmin_theta = sj.thetas[i];
    }
  }
  return res;
}

struct RadialLiminfResult {
  double value = 1.0;   // min of |u(r_n zeta)| over the tail window
  int deepest_n = 0;    // deepest ladder index that evaluated
  double deepest_r = 0.0;
  std::size_t failures = 0;
};

// liminf surrogate along the radius into zeta: the minimum of |u(r_n zeta)|
// over the tail window n in [depth/2, depth], r_n = 1 - 2^-n.  Depth is
// capped where 1 - r_n reaches the double-precision boundary guard.
inline RadialLiminfResult radial_liminf(const InnerExpr& u, BoundaryPoint zeta, int depth,
                                        double eps = 1e-6) {
  if (depth < 2) throw Error("radial_liminf: depth must be at least 2");
  depth = std::min(depth, 38);
  RadialLiminfResult res;
  res.value = std::numeric_limits<double>::infinity();
  cplx dir = zeta.point();
  for (int n = depth / 2; n <= depth; ++n) {
    double r = 1.0 - std::pow(2.0, -n);
    try {
      EvalResult e = eval_disk(u, UnitDiskPoint(r * dir), eps);
      if (std::abs(e.value) < res.value) res.value = std::abs(e.value);
      res.deepest_n = n;
      res.deepest_r = r;
    } catch (const Error&) {
      ++res.failures;
    }
  }
  if (!std::isfinite(res.value))
    throw Error("radial_liminf: no ladder point evaluated successfully");
  return res;
}

// ---------------------------------------------------------------------------
// aggregated report and verdict

struct LiminfEntry {
  double theta = 0.0;
  double value = 1.0;
  int deepest_n = 0;
  double deepest_r = 0.0;
};

struct AleksandrovReport {
  double ratio_sup_estimate = 0.0;
  std::vector<double> ratio_sup_refinements;  // one value per sample budget
  double delta_u_estimate = 0.0;
  std::vector<LiminfEntry> liminfs;  // one per singular point
  std::size_t base_samples = 0;
  int refinements = 0;
  double exclusion_radius = 0.0;
  int liminf_depth = 0;
  std::size_t samples_skipped = 0;
};

struct CertifyConfig {
  std::size_t base_samples = 256;
  int refinements = 2;               // budgets base, 4*base, 16*base
  double exclusion_radius = 1e-9;    // criteria sampling reaches deep toward Sing
  double ratio_stability_tol = 0.10;
  double liminf_margin = 0.05;
  int liminf_depth = 30;
  std::vector<double> eta_sweep = {0.3, 0.5, 0.7, 0.9, 0.99};
  int L_min = 8;
  int L_max = 12;
  ConnectivityOptions connectivity;
};

struct Verdict {
  enum class Status { evidence_one_component, evidence_not_one_component, inconclusive };
  Status status = Status::inconclusive;
  std::vector<std::string> reasons;
  AleksandrovReport aleksandrov;
  std::vector<ConnectivityReport> connectivity;
  CertifyConfig config;
};

inline const char* to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::evidence_one_component: return "evidence_one_component";
    case Verdict::Status::evidence_not_one_component: return "evidence_not_one_component";
    case Verdict::Status::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

inline AleksandrovReport aleksandrov_report(const InnerExpr& u, const SingSet& sing,
                                            const CertifyConfig& cfg) {
  AleksandrovReport rep;
  rep.base_samples = cfg.base_samples;
  rep.refinements = cfg.refinements;
  rep.exclusion_radius = cfg.exclusion_radius;
  rep.liminf_depth = cfg.liminf_depth;
  std::size_t budget = cfg.base_samples;
  for (int r = 0; r <= cfg.refinements; ++r) {
    RatioSupResult rs = derivative_ratio_sup(u, budget, cfg.exclusion_radius, sing);
    rep.ratio_sup_refinements.push_back(rs.sup);
    rep.ratio_sup_estimate = rs.sup;
    rep.samples_skipped += rs.samples_skipped;
    if (r == cfg.refinements) {
      DeltaInfResult di = delta_u_inf(u, budget, cfg.exclusion_radius, sing);
      rep.delta_u_estimate = di.inf;
    }
    budget *= 4;
  }
  for (const auto& p : sing.all_points()) {
    RadialLiminfResult rl = radial_liminf(u, p, cfg.liminf_depth);
    rep.liminfs.push_back({p.theta, rl.value, rl.deepest_n, rl.deepest_r});
  }
  return rep;
}

// Aggregated evidence.  One-component needs (a) a refinement-stable ratio
// sup, (b) every radial liminf surrogate clearly below 1, and (c) a stable
// connected verdict at some eta of the sweep.  Not-one-component fires on a
// stable disconnected verdict across the whole sweep, or on a ratio sup that
// grows monotonically through every refinement (the criterion's right-hand
// side failing); grids cannot see separations lying beyond floating-point
// depth, so ratio divergence is accepted as evidence on its own.
inline Verdict certify(const InnerExpr& u, const CertifyConfig& cfg = {}) {
  Verdict v;
  v.config = cfg;
  SingSet sing = sing_set(u);
  if (sing.description == SingSet::Description::unresolved) {
    v.status = Verdict::Status::inconclusive;
    v.reasons.push_back("singular set unresolved: " + sing.note);
    return v;
  }

  bool ratio_ok = false, ratio_diverging = false;
  try {
    v.aleksandrov = aleksandrov_report(u, sing, cfg);
    const auto& sups = v.aleksandrov.ratio_sup_refinements;
    if (sups.size() >= 2) {
      double last = sups.back(), prev = sups[sups.size() - 2];
      ratio_ok = std::fabs(last - prev) <= cfg.ratio_stability_tol * std::max(last, 1e-12);
      // divergence: every refinement raises the sup past the noise floor and
      // the final step exceeds the stability tolerance
      ratio_diverging = last > prev * (1.0 + cfg.ratio_stability_tol);
      for (std::size_t i = 1; i < sups.size(); ++i)
        if (sups[i] <= sups[i - 1] * 1.005) ratio_diverging = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "ratio_sup refinements: %.6g -> %.6g -> %.6g (%s)",
                  v.aleksandrov.ratio_sup_refinements.front(),
                  v.aleksandrov.ratio_sup_refinements.size() > 1 ? v.aleksandrov.ratio_sup_refinements[1] : 0.0,
                  v.aleksandrov.ratio_sup_refinements.back(),
                  ratio_ok ? "stable" : (ratio_diverging ? "diverging" : "unsettled"));
    v.reasons.push_back(buf);
  } catch (const Error& e) {
    v.reasons.push_back(std::string("derivative sampling failed: ") + e.what());
  }

  bool liminf_ok = true;
  for (const auto& entry : v.aleksandrov.liminfs) {
    if (entry.value >= 1.0 - cfg.liminf_margin) liminf_ok = false;
  }
  if (!v.aleksandrov.liminfs.empty())
    v.reasons.push_back(liminf_ok ? "radial liminf below 1 - margin at every singular point"
                                  : "a radial liminf surrogate stays near 1");

  bool connected_some = false, disconnected_all = true;
  RasterStack stack = build_raster_stack(u, cfg.L_min, cfg.L_max, cfg.connectivity);
  for (double eta : cfg.eta_sweep) {
    ConnectivityReport rep = connectivity_from_stack(stack, eta, cfg.connectivity);
    if (rep.verdict == ConnectivityReport::Verdict::connected) connected_some = true;
    if (rep.verdict != ConnectivityReport::Verdict::disconnected) disconnected_all = false;
    v.connectivity.push_back(std::move(rep));
  }
  v.reasons.push_back(connected_some ? "connected-stable verdict at some eta of the sweep"
                                     : "no connected verdict in the eta sweep");

  if (ratio_ok && liminf_ok && connected_some) {
    v.status = Verdict::Status::evidence_one_component;
  } else if (disconnected_all || ratio_diverging) {
    v.status = Verdict::Status::evidence_not_one_component;
    v.reasons.push_back(disconnected_all
                            ? "stable disconnected verdict across the whole eta sweep"
                            : "derivative ratio sup grows through every sample refinement");
  } else {
    v.status = Verdict::Status::inconclusive;
  }
  return v;
}

}  // namespace innerlevel
