#pragma once

// Command-line surface.  Subcommands map 1:1 onto the library operations;
// every document lands under --out with a deterministic filename and the
// schema tag innerlevel/v1.  Exit codes: 0 success, 1 verdict/test failure,
// 2 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"

#include "innerlevel/report_json.hpp"
#include "innerlevel/selftest.hpp"

namespace innerlevel::cli {

struct RunConfig {
  int level_lo = 8, level_hi = 12;
  double s = kDefaultRingExponent;
  double eps = 1e-8;
  double eta = 0.5;
  double eta_min = 0.05, eta_max = 0.95, eta_tol = 0.01;
  std::size_t samples = 1024;
  double exclusion = 1e-6;
  int liminf_depth = 30;
  std::string out_dir = ".";
  std::string formats = "json";
  // verdict thresholds
  int k_stable = 3;
  double uncertain_threshold = 0.005;
  double ratio_stability_tol = 0.10;
  double liminf_margin = 0.05;
};

namespace detail {

inline void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read config file: " + path);
  ordered_json j = ordered_json::parse(f);
  if (j.contains("levels") && j["levels"].is_array() && j["levels"].size() == 2) {
    cfg.level_lo = j["levels"][0].get<int>();
    cfg.level_hi = j["levels"][1].get<int>();
  }
  if (j.contains("s")) cfg.s = j["s"].get<double>();
  if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("eta_min")) cfg.eta_min = j["eta_min"].get<double>();
  if (j.contains("eta_max")) cfg.eta_max = j["eta_max"].get<double>();
  if (j.contains("eta_tol")) cfg.eta_tol = j["eta_tol"].get<double>();
  if (j.contains("samples")) cfg.samples = j["samples"].get<std::size_t>();
  if (j.contains("exclusion")) cfg.exclusion = j["exclusion"].get<double>();
  if (j.contains("liminf_depth")) cfg.liminf_depth = j["liminf_depth"].get<int>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("format")) cfg.formats = j["format"].get<std::string>();
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    if (t.contains("k_stable")) cfg.k_stable = t["k_stable"].get<int>();
    if (t.contains("uncertain_threshold"))
      cfg.uncertain_threshold = t["uncertain_threshold"].get<double>();
    if (t.contains("ratio_stability_tol"))
      cfg.ratio_stability_tol = t["ratio_stability_tol"].get<double>();
    if (t.contains("liminf_margin")) cfg.liminf_margin = t["liminf_margin"].get<double>();
  }
}

inline std::pair<InnerExpr, std::string> resolve_expr(const std::string& id,
                                                      const std::string& expr_text) {
  if (!id.empty() && !expr_text.empty())
    throw Error("give either --id or --expr, not both");
  if (!id.empty()) return {get_entry(id).expr, id};
  if (!expr_text.empty()) return {expr_from_json_text(expr_text), "expr"};
  throw Error("an expression is required: --id <catalog id> or --expr <json>");
}

inline cplx parse_point(const std::string& text) {
  std::size_t comma = text.find(',');
  if (comma == std::string::npos) return cplx(std::stod(text), 0.0);
  return cplx(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
}

inline std::pair<int, int> parse_levels(const std::string& text, int lo_default, int hi_default) {
  if (text.empty()) return {lo_default, hi_default};
  std::size_t dots = text.find("..");
  if (dots == std::string::npos) {
    int L = std::stoi(text);
    return {L, L};
  }
  return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

inline std::string eta_tag(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eta);
  return buf;
}

inline std::string out_path(const RunConfig& cfg, const std::string& filename) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / filename).string();
}

inline ConnectivityOptions connectivity_options(const RunConfig& cfg) {
  ConnectivityOptions opt;
  opt.s = cfg.s;
  opt.eps = cfg.eps;
  opt.k_stable = cfg.k_stable;
  opt.uncertain_threshold = cfg.uncertain_threshold;
  return opt;
}

inline CertifyConfig certify_config(const RunConfig& cfg) {
  CertifyConfig c;
  c.base_samples = std::max<std::size_t>(256, cfg.samples / 4);
  c.L_min = cfg.level_lo;
  c.L_max = cfg.level_hi;
  c.ratio_stability_tol = cfg.ratio_stability_tol;
  c.liminf_margin = cfg.liminf_margin;
  c.liminf_depth = cfg.liminf_depth;
  c.connectivity = connectivity_options(cfg);
  return c;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  using namespace detail;
  RunConfig cfg;
  // config file values load first so explicit flags can override them
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") apply_config_file(argv[i + 1], cfg);

  CLI::App app{"inner function level sets: evaluation, connectivity, certification"};
  app.require_subcommand(1);
  std::string config_file, id, expr_text, z_text, levels_text, criteria_text;
  bool contour = false;
  double theta = 0.0;
  bool have_theta = false;
  app.add_option("--config", config_file, "JSON config file (loaded before flags)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--id", id, "catalog entry id");
    sub->add_option("--expr", expr_text, "inline expression tree (JSON)");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--eps", cfg.eps, "evaluation tolerance");
    sub->add_option("--config", config_file, "JSON config file");
  };

  auto* c_eval = app.add_subcommand("eval", "evaluate at a point of the disk or circle");
  add_common(c_eval);
  c_eval->add_option("--z", z_text, "interior point re[,im]");
  c_eval->add_option("--theta", theta, "boundary angle (radians)")->each([&](const std::string&) {
    have_theta = true;
  });

  auto* c_level = app.add_subcommand("levelset", "raster one sublevel set");
  add_common(c_level);
  c_level->add_option("--eta", cfg.eta, "level in (0,1)");
  c_level->add_option("--level", levels_text, "grid level L (or L1..L2, top used)");
  c_level->add_option("--levels", levels_text, "grid level range L1..L2 (top used)");
  c_level->add_option("--s", cfg.s, "ring exponent");
  c_level->add_option("--format", cfg.formats, "comma list of json,csv,pgm");
  c_level->add_flag("--contour", contour, "emit a marching-squares contour CSV");

  auto* c_conn = app.add_subcommand("connectivity", "component counts across levels");
  add_common(c_conn);
  c_conn->add_option("--eta", cfg.eta, "level in (0,1)");
  c_conn->add_option("--levels", levels_text, "level range L1..L2");
  c_conn->add_option("--s", cfg.s, "ring exponent");

  auto* c_sweep = app.add_subcommand("sweep", "bisect for the smallest connected eta");
  add_common(c_sweep);
  c_sweep->add_option("--eta-min", cfg.eta_min, "search floor");
  c_sweep->add_option("--eta-max", cfg.eta_max, "search ceiling");
  c_sweep->add_option("--eta-tol", cfg.eta_tol, "bracket width");
  c_sweep->add_option("--level", levels_text, "top grid level");
  c_sweep->add_option("--s", cfg.s, "ring exponent");

  auto* c_alek = app.add_subcommand("aleksandrov", "derivative-ratio and liminf report");
  add_common(c_alek);
  c_alek->add_option("--samples", cfg.samples, "boundary sample budget");
  c_alek->add_option("--exclusion", cfg.exclusion, "arc exclusion radius around Sing(u)");
  c_alek->add_option("--depth", cfg.liminf_depth, "radial ladder depth");

  auto* c_cert = app.add_subcommand("certify", "aggregated one-component verdict");
  add_common(c_cert);
  c_cert->add_option("--samples", cfg.samples, "boundary sample budget");
  c_cert->add_option("--levels", levels_text, "connectivity level range L1..L2");

  auto* c_cat = app.add_subcommand("catalog", "list or dump catalog entries");
  c_cat->add_option("--id", id, "dump one entry");
  c_cat->add_option("--out", cfg.out_dir, "output directory");

  auto* c_self = app.add_subcommand("selftest", "run the acceptance criteria");
  c_self->add_option("--criteria", criteria_text, "comma list of criterion indices (default all)");
  c_self->add_option("--out", cfg.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_eval) {
      auto [expr, name] = resolve_expr(id, expr_text);
      ordered_json j;
      j["schema"] = kSchemaTag;
      j["input"] = name;
      if (have_theta) {
        cplx w = eval_boundary(expr, BoundaryPoint(theta), cfg.eps);
        j["kind"] = "boundary";
        j["theta"] = theta;
        j["value"] = {{"re", w.real()}, {"im", w.imag()}};
        j["modulus"] = std::abs(w);
      } else {
        cplx z = z_text.empty() ? cplx(0.0, 0.0) : parse_point(z_text);
        EvalResult r = eval_disk(expr, UnitDiskPoint(z), cfg.eps);
        j["kind"] = "interior";
        j["z"] = {{"re", z.real()}, {"im", z.imag()}};
        j["value"] = {{"re", r.value.real()}, {"im", r.value.imag()}};
        j["modulus"] = std::abs(r.value);
        j["abs_error_bound"] = r.abs_error_bound;
      }
      std::cout << dump_json(j);
      write_json_file(out_path(cfg, "eval_" + name + ".json"), j);
      return 0;
    }

    if (*c_level) {
      auto [expr, name] = resolve_expr(id, expr_text);
      auto [lo, hi] = parse_levels(levels_text, cfg.level_hi, cfg.level_hi);
      int L = hi;
      ConnectivityOptions opt = connectivity_options(cfg);
      auto grid = grid_for(expr, L, opt);
      auto raster = std::make_shared<const ModulusRaster>(
          rasterize_modulus(expr, grid, cfg.eps));
      LevelSetRaster l = apply_level(raster, cfg.eta);
      ComponentLabels labels = label_components(l);
      std::string stem = name + "_eta" + eta_tag(cfg.eta) + "_L" + std::to_string(L);
      ordered_json j;
      j["schema"] = kSchemaTag;
      j["eta"] = cfg.eta;
      j["level"] = L;
      j["cells"] = grid->cell_count();
      j["masked_cells"] = l.masked_cells;
      j["uncertain_cells"] = l.uncertain_cells;
      j["components"] = labels.components.size();
      ordered_json comps = ordered_json::array();
      for (const auto& c : labels.components) {
        ordered_json e;
        e["cells"] = c.cell_count;
        e["min_modulus"] = c.min_modulus;
        e["min_witness"] = {{"re", c.min_witness.real()}, {"im", c.min_witness.imag()}};
        e["holes"] = c.hole_count;
        e["touches_outermost"] = c.touches_outermost;
        comps.push_back(e);
      }
      j["component_records"] = comps;
      ordered_json arcs = ordered_json::array();
      for (const auto& a : boundary_trace(l)) {
        ordered_json e;
        e["theta_lo"] = a.theta_lo;
        e["theta_hi"] = a.theta_hi;
        arcs.push_back(e);
      }
      j["boundary_trace"] = arcs;
      write_json_file(out_path(cfg, "levelset_" + stem + ".json"), j);
      if (cfg.formats.find("csv") != std::string::npos)
        write_raster_csv(out_path(cfg, "levelset_" + stem + ".csv"), l, labels);
      if (cfg.formats.find("pgm") != std::string::npos)
        write_raster_pgm(out_path(cfg, "levelset_" + stem + ".pgm"), *raster);
      if (contour)
        write_contour_csv(out_path(cfg, "contour_" + stem + ".csv"),
                          contour_segments(*raster, cfg.eta));
      std::cout << dump_json(j);
      return 0;
    }

    if (*c_conn) {
      auto [expr, name] = resolve_expr(id, expr_text);
      auto [lo, hi] = parse_levels(levels_text, cfg.level_lo, cfg.level_hi);
      ConnectivityOptions opt = connectivity_options(cfg);
      ConnectivityReport rep = connectivity_report(expr, cfg.eta, lo, hi, opt);
      ordered_json j = connectivity_to_json(rep);
      std::string filename =
          "connectivity_" + name + "_eta" + eta_tag(cfg.eta) + "_L" + std::to_string(hi) + ".json";
      write_json_file(out_path(cfg, filename), j);
      std::cout << dump_json(j);
      return rep.verdict == ConnectivityReport::Verdict::inconclusive ? 1 : 0;
    }

    if (*c_sweep) {
      auto [expr, name] = resolve_expr(id, expr_text);
      auto [lo, hi] = parse_levels(levels_text, cfg.level_hi, cfg.level_hi);
      ConnectivityOptions opt = connectivity_options(cfg);
      EtaSearchResult res = eta_search(expr, hi, cfg.eta_min, cfg.eta_max, cfg.eta_tol, opt);
      ordered_json j = eta_search_to_json(res);
      write_json_file(out_path(cfg, "sweep_" + name + "_L" + std::to_string(hi) + ".json"), j);
      std::cout << dump_json(j);
      return res.verdict_hi == ConnectivityReport::Verdict::inconclusive ? 1 : 0;
    }

    if (*c_alek) {
      auto [expr, name] = resolve_expr(id, expr_text);
      SingSet sing = sing_set(expr);
      CertifyConfig cc = certify_config(cfg);
      cc.base_samples = std::max<std::size_t>(256, cfg.samples / 4);
      cc.exclusion_radius = cfg.exclusion;
      AleksandrovReport rep = aleksandrov_report(expr, sing, cc);
      ordered_json j = aleksandrov_to_json(rep);
      j["sing"] = sing_to_json(sing);
      write_json_file(out_path(cfg, "aleksandrov_" + name + ".json"), j);
      std::cout << dump_json(j);
      return 0;
    }

    if (*c_cert) {
      auto [expr, name] = resolve_expr(id, expr_text);
      auto [lo, hi] = parse_levels(levels_text, cfg.level_lo, cfg.level_hi);
      CertifyConfig cc = certify_config(cfg);
      cc.L_min = lo;
      cc.L_max = hi;
      Verdict v = certify(expr, cc);
      ordered_json j = verdict_to_json(v);
      write_json_file(out_path(cfg, "certify_" + name + ".json"), j);
      std::cout << dump_json(j);
      if (!id.empty()) {
        ExpectedStatus expected = get_entry(id).expected_status;
        if (expected == ExpectedStatus::one_component)
          return v.status == Verdict::Status::evidence_one_component ? 0 : 1;
        if (expected == ExpectedStatus::not_one_component)
          return v.status == Verdict::Status::evidence_not_one_component ? 0 : 1;
      }
      return v.status == Verdict::Status::inconclusive ? 1 : 0;
    }

    if (*c_cat) {
      if (!id.empty()) {
        ordered_json j = catalog_entry_to_json(get_entry(id));
        std::cout << dump_json(j);
        write_json_file(out_path(cfg, "catalog_" + id + ".json"), j);
      } else {
        ordered_json j = catalog_to_json();
        std::cout << dump_json(j);
        write_json_file(out_path(cfg, "catalog.json"), j);
      }
      return 0;
    }

    if (*c_self) {
      std::set<int> subset;
      if (!criteria_text.empty()) {
        std::stringstream ss(criteria_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) subset.insert(std::stoi(tok));
      }
      std::vector<CriterionResult> results = run_selftest(subset);
      bool all = true;
      ordered_json arr = ordered_json::array();
      for (const auto& r : results) {
        std::cout << criterion_line(r) << "\n";
        all = all && r.pass;
        ordered_json e;
        e["criterion"] = r.index;
        e["name"] = r.name;
        e["pass"] = r.pass;
        e["detail"] = r.detail;
        e["seconds"] = r.seconds;
        arr.push_back(e);
      }
      ordered_json j;
      j["schema"] = kSchemaTag;
      j["all_pass"] = all;
      j["results"] = arr;
      write_json_file(out_path(cfg, "selftest_report.json"), j);
      return all ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace innerlevel::cli
