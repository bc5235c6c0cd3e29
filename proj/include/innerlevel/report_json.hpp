#pragma once

// Deterministic JSON emission for reports: insertion-ordered keys, floats
// printed with %.17g so identical runs give byte-identical documents.
// Every document carries the schema tag "innerlevel/v1".

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "innerlevel/catalog.hpp"
#include "innerlevel/criteria.hpp"
#include "innerlevel/expr_json.hpp"

namespace innerlevel {

inline constexpr const char* kSchemaTag = "innerlevel/v1";

namespace detail {

inline void dump_deterministic(const ordered_json& j, std::string& out, int indent, int depth) {
  auto pad = [&](int d) { out.append(static_cast<std::size_t>(d * indent), ' '); };
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        pad(depth + 1);
        out += ordered_json(it.key()).dump();
        out += ": ";
        dump_deterministic(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      pad(depth);
      out += "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        pad(depth + 1);
        dump_deterministic(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      pad(depth);
      out += "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump_json(const ordered_json& j, int indent = 2) {
  std::string out;
  detail::dump_deterministic(j, out, indent, 0);
  out += "\n";
  return out;
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << dump_json(j);
}

// ---------------------------------------------------------------------------

inline ordered_json sing_to_json(const SingSet& s) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["description"] = to_string(s.description);
  ordered_json atoms = ordered_json::array();
  for (const auto& p : s.atoms) atoms.push_back(p.theta);
  j["atoms"] = atoms;
  ordered_json acc = ordered_json::array();
  for (const auto& p : s.accumulation_points) acc.push_back(p.theta);
  j["accumulation_points"] = acc;
  j["preimages_found"] = s.preimages_found;
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

inline ordered_json connectivity_to_json(const ConnectivityReport& rep) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["eta"] = rep.eta;
  j["verdict"] = to_string(rep.verdict);
  j["stable"] = rep.stable;
  j["reason"] = rep.reason;
  j["k_stable"] = rep.k_stable;
  j["uncertain_threshold"] = rep.uncertain_threshold;
  ordered_json levels = ordered_json::array();
  for (const auto& st : rep.levels) {
    ordered_json l;
    l["level"] = st.level;
    l["components"] = st.components;
    l["masked_cells"] = st.masked_cells;
    l["certain_cells"] = st.certain_cells;
    l["uncertain_cells"] = st.uncertain_cells;
    l["invalid_cells"] = st.invalid_cells;
    l["uncertain_fraction"] = st.uncertain_fraction;
    l["uncertain_bridges"] = st.uncertain_bridges;
    levels.push_back(l);
  }
  j["levels"] = levels;
  return j;
}

inline ordered_json inclusion_to_json(const InclusionReport& rep) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["checked_cells"] = rep.checked_cells;
  j["violations"] = rep.violations;
  j["max_violation_margin"] = rep.max_violation_margin;
  return j;
}

inline ordered_json aleksandrov_to_json(const AleksandrovReport& rep) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["ratio_sup_estimate"] = rep.ratio_sup_estimate;
  j["ratio_sup_refinements"] = rep.ratio_sup_refinements;
  j["delta_u_estimate"] = rep.delta_u_estimate;
  ordered_json lims = ordered_json::array();
  for (const auto& l : rep.liminfs) {
    ordered_json e;
    e["theta"] = l.theta;
    e["liminf_estimate"] = l.value;
    e["deepest_n"] = l.deepest_n;
    e["deepest_r"] = l.deepest_r;
    lims.push_back(e);
  }
  j["radial_liminfs"] = lims;
  j["base_samples"] = rep.base_samples;
  j["refinements"] = rep.refinements;
  j["exclusion_radius"] = rep.exclusion_radius;
  j["liminf_depth"] = rep.liminf_depth;
  j["samples_skipped"] = rep.samples_skipped;
  return j;
}

inline ordered_json verdict_to_json(const Verdict& v) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["status"] = to_string(v.status);
  j["reasons"] = v.reasons;
  j["thresholds"] = {{"ratio_stability_tol", v.config.ratio_stability_tol},
                     {"liminf_margin", v.config.liminf_margin},
                     {"liminf_depth", v.config.liminf_depth},
                     {"uncertain_threshold", v.config.connectivity.uncertain_threshold},
                     {"k_stable", v.config.connectivity.k_stable},
                     {"eta_sweep", v.config.eta_sweep},
                     {"base_samples", v.config.base_samples},
                     {"refinements", v.config.refinements},
                     {"exclusion_radius", v.config.exclusion_radius}};
  j["inputs"] = ordered_json::object();
  j["inputs"]["aleksandrov"] = aleksandrov_to_json(v.aleksandrov);
  ordered_json conn = ordered_json::array();
  for (const auto& rep : v.connectivity) conn.push_back(connectivity_to_json(rep));
  j["inputs"]["connectivity"] = conn;
  return j;
}

inline ordered_json eta_search_to_json(const EtaSearchResult& res) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["found"] = res.found;
  j["floor_hit"] = res.floor_hit;
  j["bracket_lo"] = res.bracket_lo;
  j["bracket_hi"] = res.bracket_hi;
  j["verdict_lo"] = to_string(res.verdict_lo);
  j["verdict_hi"] = to_string(res.verdict_hi);
  ordered_json probes = ordered_json::array();
  for (const auto& [eta, verdict] : res.probes) {
    ordered_json p;
    p["eta"] = eta;
    p["verdict"] = to_string(verdict);
    probes.push_back(p);
  }
  j["probes"] = probes;
  return j;
}

inline ordered_json catalog_entry_to_json(const CatalogEntry& e) {
  ordered_json j;
  j["schema"] = kSchemaTag;
  j["id"] = e.id;
  j["expected_status"] = to_string(e.expected_status);
  j["provenance"] = e.provenance;
  j["expr"] = expr_to_json(e.expr);
  return j;
}

inline ordered_json catalog_to_json() {
  ordered_json j;
  j["schema"] = kSchemaTag;
  ordered_json entries = ordered_json::array();
  for (const auto& e : catalog_entries()) entries.push_back(catalog_entry_to_json(e));
  j["entries"] = entries;
  return j;
}

}  // namespace innerlevel
