#pragma once

// The acceptance suite: nine criteria over the catalog, each with pinned
// tolerances, reported one pass/fail line at a time.  The CLI `selftest`
// subcommand and the acceptance test binary both run these.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "innerlevel/catalog.hpp"
#include "innerlevel/criteria.hpp"
#include "innerlevel/raster_io.hpp"

namespace innerlevel {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace selftest_detail {

inline cplx random_disk_point(std::mt19937_64& rng, double max_radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::polar(max_radius * std::sqrt(unit(rng)), kTwoPi * unit(rng));
}

struct Check {
  bool ok = true;
  std::size_t failures = 0;
  double worst = 0.0;
  std::string note;
  void expect(bool cond, double badness = 1.0) {
    if (!cond) {
      ok = false;
      ++failures;
      worst = std::max(worst, badness);
    }
  }
};

// collect the parametric zero sequences of a tree
inline void collect_infinite_sequences(const InnerExpr& u, std::vector<ZeroSequence>& out) {
  switch (u.tag()) {
    case InnerExpr::Tag::blaschke:
      if (!u.zeros().is_finite()) out.push_back(u.zeros());
      return;
    case InnerExpr::Tag::product:
      for (const auto& f : u.factors()) collect_infinite_sequences(f, out);
      return;
    case InnerExpr::Tag::compose:
      collect_infinite_sequences(u.outer(), out);
      collect_infinite_sequences(u.inner(), out);
      return;
    case InnerExpr::Tag::mobius_shift:
    case InnerExpr::Tag::reflect:
      collect_infinite_sequences(u.child(), out);
      return;
    default:
      return;
  }
}

inline bool tree_is_finite(const InnerExpr& u) {
  std::vector<ZeroSequence> seqs;
  collect_infinite_sequences(u, seqs);
  return seqs.empty();
}

struct FdJet {
  cplx d1, d2;
};

inline FdJet fd_boundary(const InnerExpr& u, double theta, double h) {
  auto g = [&](double t) { return eval_boundary(u, BoundaryPoint(t), 1e-13); };
  cplx gp2 = g(theta + 2 * h), gp1 = g(theta + h), g0 = g(theta), gm1 = g(theta - h),
       gm2 = g(theta - 2 * h);
  cplx d1t = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
  cplx d2t = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * h * h);
  cplx e = std::polar(1.0, theta);
  cplx up = d1t / (cplx(0.0, 1.0) * e);
  cplx upp = -(d2t + up * e) / (e * e);
  return {up, upp};
}

}  // namespace selftest_detail

// Shared state between connectivity-dependent criteria (5 feeds 6 and 7).
struct SelftestContext {
  std::map<std::string, double> connected_eta;                       // criterion 5 results
  std::map<std::string, ComponentLabels> top_labels;                 // labels at the top level
  std::map<std::string, std::shared_ptr<const ModulusRaster>> top_raster;
  bool criterion5_ran = false;
};

// --- criterion 1 ----------------------------------------------------------

inline CriterionResult criterion_1_geometry() {
  using namespace selftest_detail;
  CriterionResult res{1, "geometry suite: mobius identities and Schwarz-Pick"};
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Check chk;
  for (int i = 0; i < 10000; ++i) {
    cplx a = random_disk_point(rng, 0.98);
    cplx xi = std::polar(1.0, kTwoPi * unit(rng));
    chk.expect(std::abs(mobius_eval(a, a)) <= 1e-10);
    chk.expect(std::fabs(std::abs(mobius_eval(a, xi)) - 1.0) <= 1e-10);
  }
  std::size_t pair_failures = 0;
  for (const auto& entry : catalog_entries()) {
    for (int i = 0; i < 1000; ++i) {
      cplx z = random_disk_point(rng, 0.95);
      cplx w = random_disk_point(rng, 0.95);
      cplx uz = eval_disk(entry.expr, UnitDiskPoint(z), 1e-12).value;
      cplx uw = eval_disk(entry.expr, UnitDiskPoint(w), 1e-12).value;
      if (pseudo_distance(uz, uw) > pseudo_distance(z, w) + 1e-9) {
        chk.expect(false);
        ++pair_failures;
      }
    }
  }
  res.pass = chk.ok;
  std::ostringstream os;
  os << "10000 mobius pairs, " << catalog_entries().size()
     << " entries x 1000 contraction pairs, failures=" << chk.failures;
  res.detail = os.str();
  return res;
}

// --- criterion 2 ----------------------------------------------------------

inline CriterionResult criterion_2_truncation() {
  using namespace selftest_detail;
  CriterionResult res{2, "evaluation oracle: depth N vs 4N within the reported bound"};
  std::mt19937_64 rng(202);
  Check chk;
  std::size_t sequences = 0;
  for (const auto& entry : catalog_entries()) {
    std::vector<ZeroSequence> seqs;
    collect_infinite_sequences(entry.expr, seqs);
    for (const auto& seq : seqs) {
      ++sequences;
      for (int i = 0; i < 100; ++i) {
        cplx z = random_disk_point(rng, 0.97);
        double eps = 1e-9;
        std::size_t N = truncation_depth(seq, UnitDiskPoint(z), eps);
        auto partial = [&](std::size_t upto) {
          cplx v(1.0, 0.0);
          for (std::size_t n = 1; n <= upto; ++n)
            v *= detail::blaschke_factor_jet(seq.zero(n), z).f;
          return v;
        };
        double gap = std::abs(partial(N) - partial(4 * N));
        chk.expect(gap <= eps, gap);
      }
    }
  }
  res.pass = chk.ok;
  std::ostringstream os;
  os << sequences << " infinite sequences x 100 points, failures=" << chk.failures
     << ", worst gap=" << chk.worst;
  res.detail = os.str();
  return res;
}

// --- criterion 3 ----------------------------------------------------------

inline CriterionResult criterion_3_derivatives() {
  using namespace selftest_detail;
  CriterionResult res{3, "derivative suite: jets vs finite differences, series bound"};
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Check chk;
  std::size_t finite_entries = 0;
  for (const auto& entry : catalog_entries()) {
    if (!tree_is_finite(entry.expr)) continue;
    ++finite_entries;
    SingSet sing = sing_set(entry.expr);
    int done = 0;
    while (done < 200) {
      double theta = kTwoPi * unit(rng);
      double d = sing.arc_distance_to(theta);
      if (d < 0.05) continue;
      ++done;
      Jet j = boundary_jet(entry.expr, BoundaryPoint(theta), 1e-12);
      double h = std::min(1e-3, 0.008 * d * d);
      FdJet fd = fd_boundary(entry.expr, theta, h);
      double e1 = std::abs(j.d1 - fd.d1) / std::max(1.0, std::abs(fd.d1));
      double e2 = std::abs(j.d2 - fd.d2) / std::max(1.0, std::abs(fd.d2));
      chk.expect(e1 <= 1e-6, e1);
      chk.expect(e2 <= 1e-6, e2);
    }
  }
  // the derivative series of Blaschke products: against finite differences
  // and against the termwise lower bound (1-|a|)/(1+|a|)
  std::vector<ZeroSequence> series_seqs = {
      ZeroSequence::geometric(0.5),
      ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}, {cplx(-0.3, 0.4), 2}}),
  };
  for (const auto& seq : series_seqs) {
    InnerExpr b = InnerExpr::blaschke(seq);
    SingSet sing = sing_set(b);
    int done = 0;
    while (done < 100) {
      double theta = kTwoPi * unit(rng);
      double d = sing.arc_distance_to(theta);
      if (d < 0.05) continue;
      ++done;
      double series = blaschke_boundary_derivative_modulus(seq, BoundaryPoint(theta), 1e-11);
      double h = std::min(1e-3, 0.008 * d * d);
      FdJet fd = fd_boundary(b, theta, h);
      double rel = std::fabs(series - std::abs(fd.d1)) / std::max(1.0, std::abs(fd.d1));
      chk.expect(rel <= 1e-6, rel);
      for (std::size_t n = 1; n <= 12; ++n) {
        if (seq.is_finite() && n > seq.finite_count()) break;
        double a = std::abs(seq.zero(n));
        if (a >= 1.0) break;
        chk.expect(series >= (1.0 - a) / (1.0 + a) - 1e-12);
      }
    }
  }
  res.pass = chk.ok;
  std::ostringstream os;
  os << finite_entries << " finite entries x 200 points, 2 series x 100 points, failures="
     << chk.failures << ", worst rel err=" << chk.worst;
  res.detail = os.str();
  return res;
}

// --- criterion 4 ----------------------------------------------------------

inline CriterionResult criterion_4_composition() {
  using namespace selftest_detail;
  CriterionResult res{4, "composition identity: decomposition equals composed tree"};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Check chk;
  std::vector<std::pair<InnerExpr, InnerExpr>> pairs = {
      {get_entry("finite_blaschke_2").expr, get_entry("finite_blaschke_2").expr},
      {InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 1}})),
       InnerExpr::blaschke(ZeroSequence::explicit_zeros({{cplx(-0.5, 0.0), 1}}))},
      {get_entry("geometric_b").expr, get_entry("atomic_S").expr},
      {get_entry("atomic_S").expr, get_entry("geometric_b").expr},
      {get_entry("finite_blaschke_mixed").expr, get_entry("finite_blaschke_pair").expr},
  };
  for (const auto& [u, v] : pairs) {
    SingSet sing = sing_set(compose(u, v));
    int done = 0;
    std::size_t attempts = 0;
    while (done < 200 && attempts < 40000) {
      ++attempts;
      double theta = kTwoPi * unit(rng);
      if (sing.arc_distance_to(theta) < 2e-3) continue;
      ComposeRatio r;
      try {
        r = compose_ratio_A(u, v, BoundaryPoint(theta), 1e-12);
      } catch (const Error&) {
        continue;
      }
      ++done;
      double gap = std::abs(r.via_decomposition - r.via_composed_tree);
      chk.expect(gap <= 1e-9, gap);
    }
    chk.expect(done == 200);
  }

  // sampled |A| of b∘S against the sup-bound decomposition
  const InnerExpr& b = get_entry("geometric_b").expr;
  const InnerExpr& S = get_entry("atomic_S").expr;
  double sup_b = derivative_ratio_sup(b, 4096, 1e-9).sup;
  double sup_S = derivative_ratio_sup(S, 4096, 1e-9).sup;
  double delta_b = delta_u_inf(b, 4096, 1e-9).inf;
  double bound = sup_b + (1.0 / delta_b) * sup_S;
  SingSet sing = sing_set(compose(b, S));
  int done = 0;
  std::size_t attempts = 0;
  double worst_A = 0.0;
  while (done < 200 && attempts < 40000) {
    ++attempts;
    double theta = kTwoPi * unit(rng);
    if (sing.arc_distance_to(theta) < 2e-3) continue;
    ComposeRatio r;
    try {
      r = compose_ratio_A(b, S, BoundaryPoint(theta), 1e-12);
    } catch (const Error&) {
      continue;
    }
    ++done;
    worst_A = std::max(worst_A, std::abs(r.via_decomposition));
    chk.expect(std::abs(r.via_decomposition) <= bound + 1e-6,
               std::abs(r.via_decomposition) - bound);
  }
  chk.expect(done == 200);
  res.pass = chk.ok;
  std::ostringstream os;
  os << "5 pairs x 200 samples; b∘S: max |A|=" << worst_A << " vs bound " << bound
     << "; failures=" << chk.failures;
  res.detail = os.str();
  return res;
}

// --- criterion 5 ----------------------------------------------------------

inline CriterionResult criterion_5_connectivity(SelftestContext& ctx) {
  CriterionResult res{5, "connectivity fixtures: stable verdicts over the eta grid"};
  ConnectivityOptions opt;
  const int L_min = 8, L_max = 12;
  std::vector<std::string> connected_ids = {"finite_blaschke_2", "atomic_S", "finite_atoms_3",
                                            "geometric_b",       "theta_Sv", "b_compose_S"};
  std::vector<double> eta_grid = {0.3, 0.5, 0.7, 0.9};
  std::ostringstream os;
  bool pass = true;
  for (const auto& id : connected_ids) {
    const auto& entry = get_entry(id);
    RasterStack stack = build_raster_stack(entry.expr, L_min, L_max, opt);
    bool got = false;
    for (double eta : eta_grid) {
      ConnectivityReport rep = connectivity_from_stack(stack, eta, opt);
      if (rep.verdict == ConnectivityReport::Verdict::connected) {
        got = true;
        ctx.connected_eta[id] = eta;
        LevelSetRaster l = apply_level(stack.rasters.back(), eta);
        ctx.top_labels[id] = label_components(l);
        ctx.top_raster[id] = stack.rasters.back();
        os << id << ": connected at eta=" << eta << "; ";
        break;
      }
    }
    if (!got) {
      pass = false;
      os << id << ": NO connected eta in the grid; ";
    }
  }
  // the thin-product clause, implemented exactly as stated
  {
    const auto& entry = get_entry("factorial_v");
    ConnectivityReport rep = connectivity_report(entry.expr, 0.9, 10, 12, opt);
    bool disconnected = rep.verdict == ConnectivityReport::Verdict::disconnected;
    bool multi = true, bridge_free = true;
    for (const auto& st : rep.levels) {
      if (st.components < 2) multi = false;
      if (st.uncertain_bridges) bridge_free = false;
    }
    if (!(disconnected && multi && bridge_free)) {
      pass = false;
      os << "factorial_v at eta=0.9 L=10..12: verdict=" << to_string(rep.verdict)
         << " components=";
      for (const auto& st : rep.levels) os << st.components << ",";
      os << " (expected disconnected with >=2 components)";
    } else {
      os << "factorial_v: disconnected at eta=0.9";
    }
    ctx.top_raster["factorial_v"] = nullptr;
  }
  ctx.criterion5_ran = true;
  res.pass = pass;
  res.detail = os.str();
  return res;
}

// --- criterion 6 ----------------------------------------------------------

inline CriterionResult criterion_6_inclusions(SelftestContext& ctx) {
  CriterionResult res{6, "inclusion chains and factor bounds for theta_Sv"};
  ConnectivityOptions copt;
  double eta = 0.3;
  if (ctx.criterion5_ran) {
    auto it = ctx.connected_eta.find("theta_Sv");
    if (it != ctx.connected_eta.end()) eta = it->second;
  }
  const InnerExpr& theta = get_entry("theta_Sv").expr;
  const InnerExpr& u = get_entry("atomic_S").expr;
  const InnerExpr& v = get_entry("factorial_v").expr;
  bool pass = true;
  std::ostringstream os;
  os << "eta=" << eta << "; ";
  double prev_sigma = -1.0;
  bool sigma_monotone = true;
  for (int L : {10, 11, 12}) {
    auto grid = grid_for(theta, L, copt);
    auto rt = std::make_shared<const ModulusRaster>(rasterize_modulus(theta, grid, copt.eps));
    auto ru = std::make_shared<const ModulusRaster>(rasterize_modulus(u, grid, copt.eps));
    auto rv = std::make_shared<const ModulusRaster>(rasterize_modulus(v, grid, copt.eps));
    FactorBounds fb = factor_bounds_estimate(*rt, *ru, *rv, eta);
    if (fb.sigma_hat <= prev_sigma) sigma_monotone = false;
    prev_sigma = fb.sigma_hat;
    if (L != 12) continue;

    double widen = fb.margin;
    double sigma_lvl = std::min(fb.sigma_hat + widen, 1.0 - 1e-9);
    double delta_lvl = std::max(fb.delta_hat - widen, 1e-9);
    // Eq. (oo): Omega_v(eta) in Omega_Theta(eta) in Omega_v(sigma)
    InclusionReport oo1 = inclusion_check(apply_level(rv, eta, widen), apply_level(rt, eta, widen));
    InclusionReport oo2 = inclusion_check(apply_level(rt, eta, widen), apply_level(rv, sigma_lvl, widen));
    // Eq. (ooo): Omega_u(delta) in Omega_Theta(eta) and in Omega_v(sigma)
    InclusionReport ooo1 = inclusion_check(apply_level(ru, delta_lvl, widen), apply_level(rt, eta, widen));
    InclusionReport ooo2 = inclusion_check(apply_level(ru, delta_lvl, widen), apply_level(rv, sigma_lvl, widen));
    os << "L=12: delta_hat=" << fb.delta_hat << " sigma_hat=" << fb.sigma_hat
       << " margin=" << fb.margin << "; violations oo=(" << oo1.violations << ","
       << oo2.violations << ") ooo=(" << ooo1.violations << "," << ooo2.violations << "); ";
    if (oo1.violations + oo2.violations + ooo1.violations + ooo2.violations != 0) pass = false;
  }
  os << "sigma_hat monotone across L=10,11,12: " << (sigma_monotone ? "yes" : "NO")
     << " (last=" << prev_sigma << ")";
  if (!sigma_monotone) pass = false;
  res.pass = pass;
  res.detail = os.str();
  return res;
}

// --- criterion 7 ----------------------------------------------------------

inline CriterionResult criterion_7_components(SelftestContext& ctx) {
  CriterionResult res{7, "component diagnostics: no holes, minima near zero"};
  if (!ctx.criterion5_ran) {
    SelftestContext fresh;
    criterion_5_connectivity(fresh);
    ctx = std::move(fresh);
  }
  bool pass = true;
  std::ostringstream os;
  for (const auto& [id, labels] : ctx.top_labels) {
    for (const auto& comp : labels.components) {
      if (comp.hole_count != 0) {
        pass = false;
        os << id << ": component with " << comp.hole_count << " holes; ";
      }
      if (!(comp.min_modulus < 0.05)) {
        pass = false;
        os << id << ": component min modulus " << comp.min_modulus << " >= 0.05; ";
      }
    }
    os << id << ": " << labels.components.size() << " component(s) ok; ";
  }
  res.pass = pass;
  res.detail = os.str();
  return res;
}

// --- criterion 8 ----------------------------------------------------------

inline CriterionResult criterion_8_aleksandrov() {
  CriterionResult res{8, "aleksandrov suite: liminfs and ratio-sup stability"};
  bool pass = true;
  std::ostringstream os;
  // radial liminfs at singular points and at regular probes
  for (const std::string& id : {"atomic_S", "finite_atoms_3", "geometric_b"}) {
    const auto& entry = get_entry(id);
    SingSet sing = sing_set(entry.expr);
    for (const auto& p : sing.all_points()) {
      RadialLiminfResult rl = radial_liminf(entry.expr, p, 30);
      if (!(rl.value < 0.5)) {
        pass = false;
        os << id << ": liminf " << rl.value << " at theta=" << p.theta << " not < 0.5; ";
      }
    }
    int probes = 0;
    for (double theta = 0.05; theta < kTwoPi && probes < 8; theta += kTwoPi / 17.0) {
      if (sing.arc_distance_to(theta) <= 0.1) continue;
      ++probes;
      RadialLiminfResult rl = radial_liminf(entry.expr, BoundaryPoint(theta), 30);
      if (!(rl.value > 0.99)) {
        pass = false;
        os << id << ": regular probe " << rl.value << " at theta=" << theta << " not > 0.99; ";
      }
    }
  }
  // ratio-sup stability for one-component entries, divergence for the thin one
  for (const auto& entry : catalog_entries()) {
    if (entry.expected_status == ExpectedStatus::unspecified) continue;
    SingSet sing = sing_set(entry.expr);
    double s1 = derivative_ratio_sup(entry.expr, 256, 1e-9, sing).sup;
    double s2 = derivative_ratio_sup(entry.expr, 1024, 1e-9, sing).sup;
    double s3 = derivative_ratio_sup(entry.expr, 4096, 1e-9, sing).sup;
    bool stable = std::fabs(s3 - s2) <= 0.10 * std::max(s3, 1e-12);
    if (entry.expected_status == ExpectedStatus::one_component) {
      if (!stable) {
        pass = false;
        os << entry.id << ": sup not stable (" << s1 << " -> " << s2 << " -> " << s3 << "); ";
      }
    } else if (entry.id == "factorial_v") {
      if (stable) {
        pass = false;
        os << "factorial_v: sup stabilized (" << s1 << " -> " << s2 << " -> " << s3
           << "), expected non-stabilizing; ";
      } else {
        os << "factorial_v: non-stabilizing (" << s1 << " -> " << s2 << " -> " << s3 << "); ";
      }
    }
  }
  res.pass = pass;
  res.detail = os.str().empty() ? "liminfs and stability all within bounds" : os.str();
  return res;
}

// --- criterion 9 ----------------------------------------------------------

inline CriterionResult criterion_9_verdicts() {
  CriterionResult res{9, "verdict agreement: certify vs expected status"};
  bool pass = true;
  std::ostringstream os;
  std::vector<std::string> exceptions_used;
  for (const auto& entry : catalog_entries()) {
    if (entry.expected_status == ExpectedStatus::unspecified) continue;
    Verdict v = certify(entry.expr);
    bool match =
        (entry.expected_status == ExpectedStatus::one_component &&
         v.status == Verdict::Status::evidence_one_component) ||
        (entry.expected_status == ExpectedStatus::not_one_component &&
         v.status == Verdict::Status::evidence_not_one_component);
    if (match) continue;
    if (inconclusive_allowed(entry.id) && v.status == Verdict::Status::inconclusive) {
      exceptions_used.push_back(entry.id);
      continue;
    }
    pass = false;
    os << entry.id << ": certify=" << to_string(v.status) << " expected "
       << to_string(entry.expected_status) << "; ";
  }
  os << "exception list: ";
  if (exceptions_used.empty())
    os << "(empty)";
  else
    for (const auto& id : exceptions_used) os << id << " ";
  res.pass = pass;
  res.detail = os.str();
  return res;
}

// ---------------------------------------------------------------------------

inline std::vector<CriterionResult> run_selftest(const std::set<int>& subset = {}) {
  SelftestContext ctx;
  std::vector<CriterionResult> out;
  auto want = [&](int k) { return subset.empty() || subset.count(k) > 0; };
  auto timed = [&](const std::function<CriterionResult()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  if (want(1)) timed([] { return criterion_1_geometry(); });
  if (want(2)) timed([] { return criterion_2_truncation(); });
  if (want(3)) timed([] { return criterion_3_derivatives(); });
  if (want(4)) timed([] { return criterion_4_composition(); });
  if (want(5)) timed([&] { return criterion_5_connectivity(ctx); });
  if (want(6)) timed([&] { return criterion_6_inclusions(ctx); });
  if (want(7)) timed([&] { return criterion_7_components(ctx); });
  if (want(8)) timed([] { return criterion_8_aleksandrov(); });
  if (want(9)) timed([] { return criterion_9_verdicts(); });
  return out;
}

inline std::string criterion_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%s] criterion %d (%.1fs): ", r.pass ? "PASS" : "FAIL", r.index,
                r.seconds);
  return std::string(buf) + r.name + " -- " + r.detail;
}

}  // namespace innerlevel
