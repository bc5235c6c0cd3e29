#pragma once

// JSON form of expression trees, the exchange format of the CLI and the
// test fixtures.  Node tags: blaschke / singular / identity / unimodular /
// product / compose / mobius_shift / reflect; zero-sequence kinds:
// explicit / geometric / factorial / negated_mirror.

#include <string>

#include "json.hpp"

#include "innerlevel/inner_expr.hpp"

namespace innerlevel {

using ordered_json = nlohmann::ordered_json;

inline ordered_json zeros_to_json(const ZeroSequence& seq) {
  ordered_json j;
  switch (seq.kind()) {
    case ZeroSequence::Kind::explicit_list: {
      j["kind"] = "explicit";
      ordered_json list = ordered_json::array();
      for (const auto& z : seq.explicit_list()) {
        ordered_json e;
        e["re"] = z.a.real();
        e["im"] = z.a.imag();
        e["multiplicity"] = z.multiplicity;
        list.push_back(e);
      }
      j["zeros"] = list;
      return j;
    }
    case ZeroSequence::Kind::geometric:
      j["kind"] = "geometric";
      j["q"] = seq.q();
      break;
    case ZeroSequence::Kind::factorial:
      j["kind"] = "factorial";
      break;
    case ZeroSequence::Kind::negated_mirror:
      j["kind"] = "negated_mirror";
      j["base"] = zeros_to_json(seq.base());
      break;
  }
  if (!seq.removed_indices().empty()) j["removed"] = seq.removed_indices();
  return j;
}

inline ZeroSequence zeros_from_json(const ordered_json& j) {
  std::string kind = j.at("kind").get<std::string>();
  ZeroSequence seq = ZeroSequence::explicit_zeros({});
  if (kind == "explicit") {
    std::vector<ZeroSequence::ExplicitZero> zs;
    for (const auto& e : j.at("zeros")) {
      ZeroSequence::ExplicitZero z;
      z.a = cplx(e.at("re").get<double>(), e.at("im").get<double>());
      z.multiplicity = e.value("multiplicity", 1);
      zs.push_back(z);
    }
    seq = ZeroSequence::explicit_zeros(std::move(zs));
  } else if (kind == "geometric") {
    seq = ZeroSequence::geometric(j.at("q").get<double>());
  } else if (kind == "factorial") {
    seq = ZeroSequence::factorial();
  } else if (kind == "negated_mirror") {
    seq = ZeroSequence::negated_mirror(zeros_from_json(j.at("base")));
  } else {
    throw Error("zeros_from_json: unknown kind '" + kind + "'");
  }
  if (j.contains("removed")) seq.set_removed_indices(j.at("removed").get<std::vector<std::size_t>>());
  return seq;
}

inline ordered_json expr_to_json(const InnerExpr& e) {
  ordered_json j;
  switch (e.tag()) {
    case InnerExpr::Tag::blaschke:
      j["type"] = "blaschke";
      j["zeros"] = zeros_to_json(e.zeros());
      return j;
    case InnerExpr::Tag::singular: {
      j["type"] = "singular";
      ordered_json atoms = ordered_json::array();
      for (const auto& a : e.measure().atoms) {
        ordered_json atom;
        atom["theta"] = a.zeta.theta;
        atom["weight"] = a.weight;
        atoms.push_back(atom);
      }
      j["atoms"] = atoms;
      return j;
    }
    case InnerExpr::Tag::identity:
      j["type"] = "identity";
      return j;
    case InnerExpr::Tag::unimodular:
      j["type"] = "unimodular";
      j["theta"] = e.unimodular_theta();
      return j;
    case InnerExpr::Tag::product: {
      j["type"] = "product";
      ordered_json fs = ordered_json::array();
      for (const auto& f : e.factors()) fs.push_back(expr_to_json(f));
      j["factors"] = fs;
      return j;
    }
    case InnerExpr::Tag::compose:
      j["type"] = "compose";
      j["outer"] = expr_to_json(e.outer());
      j["inner"] = expr_to_json(e.inner());
      return j;
    case InnerExpr::Tag::mobius_shift:
      j["type"] = "mobius_shift";
      j["a"] = {{"re", e.shift_parameter().real()}, {"im", e.shift_parameter().imag()}};
      j["child"] = expr_to_json(e.child());
      return j;
    case InnerExpr::Tag::reflect:
      j["type"] = "reflect";
      j["child"] = expr_to_json(e.child());
      return j;
  }
  throw Error("expr_to_json: bad node");
}

inline InnerExpr expr_from_json(const ordered_json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "blaschke") return InnerExpr::blaschke(zeros_from_json(j.at("zeros")));
  if (type == "singular") {
    AtomicSingularMeasure mu;
    for (const auto& a : j.at("atoms"))
      mu.atoms.push_back({BoundaryPoint(a.at("theta").get<double>()), a.at("weight").get<double>()});
    return InnerExpr::singular(std::move(mu));
  }
  if (type == "identity") return InnerExpr::identity();
  if (type == "unimodular") return InnerExpr::unimodular(j.at("theta").get<double>());
  if (type == "product") {
    std::vector<InnerExpr> fs;
    for (const auto& f : j.at("factors")) fs.push_back(expr_from_json(f));
    return InnerExpr::product(std::move(fs));
  }
  if (type == "compose") return compose(expr_from_json(j.at("outer")), expr_from_json(j.at("inner")));
  if (type == "mobius_shift") {
    cplx a(j.at("a").at("re").get<double>(), j.at("a").at("im").get<double>());
    return InnerExpr::mobius_shift(a, expr_from_json(j.at("child")));
  }
  if (type == "reflect") return reflect(expr_from_json(j.at("child")));
  throw Error("expr_from_json: unknown type '" + type + "'");
}

inline InnerExpr expr_from_json_text(const std::string& text) {
  return expr_from_json(ordered_json::parse(text));
}

}  // namespace innerlevel
