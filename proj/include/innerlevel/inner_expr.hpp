#pragma once

// Expression trees over inner-function primitives (Blaschke products, atomic
// singular factors, the identity, unimodular constants), closed under
// product, composition, Moebius shift and reflection z -> u(-z).  Trees are
// immutable; constructors share subtrees.

#include <memory>
#include <utility>
#include <vector>

#include "innerlevel/zero_sequence.hpp"

namespace innerlevel {

// Finite positive atomic measure on the circle; drives the singular factor
//   S_mu(z) = prod_k exp(-c_k (zeta_k + z) / (zeta_k - z)).
struct AtomicSingularMeasure {
  struct Atom {
    BoundaryPoint zeta;
    double weight = 1.0;
  };
  std::vector<Atom> atoms;

  void validate() const {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(atoms[i].weight > 0.0))
        throw Error("AtomicSingularMeasure: weights must be strictly positive");
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        if (arc_distance(atoms[i].zeta.theta, atoms[j].zeta.theta) < 1e-12)
          throw Error("AtomicSingularMeasure: atom angles must be pairwise distinct");
    }
  }
};

class InnerExpr {
 public:
  enum class Tag { blaschke, singular, identity, unimodular, product, compose, mobius_shift, reflect };

  InnerExpr() : InnerExpr(identity()) {}

  static InnerExpr blaschke(ZeroSequence zeros) {
    auto n = std::make_shared<Node>();
    n->tag = Tag::blaschke;
    n->zeros = std::move(zeros);
    return InnerExpr(std::move(n));
  }

  static InnerExpr singular(AtomicSingularMeasure mu) {
    mu.validate();
    if (mu.atoms.empty()) throw Error("InnerExpr: singular factor needs at least one atom");
    auto n = std::make_shared<Node>();
    n->tag = Tag::singular;
    n->mu = std::move(mu);
    return InnerExpr(std::move(n));
  }

  static InnerExpr identity() {
    auto n = std::make_shared<Node>();
    n->tag = Tag::identity;
    return InnerExpr(std::move(n));
  }

  static InnerExpr unimodular(double theta) {
    auto n = std::make_shared<Node>();
    n->tag = Tag::unimodular;
    n->theta = normalize_angle(theta);
    return InnerExpr(std::move(n));
  }

  static InnerExpr product(std::vector<InnerExpr> factors) {
    if (factors.empty()) throw Error("InnerExpr: product needs at least one factor");
    if (factors.size() == 1) return factors.front();
    auto n = std::make_shared<Node>();
    n->tag = Tag::product;
    n->children = std::move(factors);
    return InnerExpr(std::move(n));
  }

  static InnerExpr compose(InnerExpr outer, InnerExpr inner) {
    auto n = std::make_shared<Node>();
    n->tag = Tag::compose;
    n->children = {std::move(outer), std::move(inner)};
    return InnerExpr(std::move(n));
  }

  // phi_a composed with child (the Frostman shift when |a| is small enough).
  static InnerExpr mobius_shift(cplx a, InnerExpr child) {
    if (std::abs(a) >= 1.0) throw Error("InnerExpr: mobius_shift needs |a| < 1");
    auto n = std::make_shared<Node>();
    n->tag = Tag::mobius_shift;
    n->a = a;
    n->children = {std::move(child)};
    return InnerExpr(std::move(n));
  }

  // z -> child(-z)
  static InnerExpr reflect(InnerExpr child) {
    auto n = std::make_shared<Node>();
    n->tag = Tag::reflect;
    n->children = {std::move(child)};
    return InnerExpr(std::move(n));
  }

  Tag tag() const { return node_->tag; }
  const ZeroSequence& zeros() const { require(Tag::blaschke); return node_->zeros; }
  const AtomicSingularMeasure& measure() const { require(Tag::singular); return node_->mu; }
  double unimodular_theta() const { require(Tag::unimodular); return node_->theta; }
  const std::vector<InnerExpr>& factors() const { require(Tag::product); return node_->children; }
  const InnerExpr& outer() const { require(Tag::compose); return node_->children[0]; }
  const InnerExpr& inner() const { require(Tag::compose); return node_->children[1]; }
  cplx shift_parameter() const { require(Tag::mobius_shift); return node_->a; }
  const InnerExpr& child() const {
    if (node_->tag != Tag::mobius_shift && node_->tag != Tag::reflect)
      throw Error("InnerExpr: node has no single child");
    return node_->children[0];
  }

  std::size_t tree_size() const {
    std::size_t n = 1;
    for (const auto& c : node_->children) n += c.tree_size();
    return n;
  }

 private:
  struct Node {
    Tag tag = Tag::identity;
    ZeroSequence zeros = ZeroSequence::explicit_zeros({});
    AtomicSingularMeasure mu;
    double theta = 0.0;
    cplx a{0.0, 0.0};
    std::vector<InnerExpr> children;
  };

  explicit InnerExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  void require(Tag t) const {
    if (node_->tag != t) throw Error("InnerExpr: wrong node kind for accessor");
  }

  std::shared_ptr<const Node> node_;
};

inline InnerExpr product(InnerExpr u, InnerExpr v) {
  return InnerExpr::product({std::move(u), std::move(v)});
}

inline InnerExpr compose(InnerExpr u, InnerExpr v) {
  return InnerExpr::compose(std::move(u), std::move(v));
}

inline InnerExpr frostman_shift(InnerExpr u, cplx a) {
  return InnerExpr::mobius_shift(a, std::move(u));
}

inline InnerExpr reflect(InnerExpr u) { return InnerExpr::reflect(std::move(u)); }

namespace detail {

inline bool try_remove_zero(const InnerExpr& e, cplx a, double tol, InnerExpr& out) {
  switch (e.tag()) {
    case InnerExpr::Tag::blaschke: {
      ZeroSequence zs = e.zeros();
      if (!zs.remove_zero(a, tol)) return false;
      if (zs.is_finite() && zs.finite_count() == 0)
        out = InnerExpr::unimodular(0.0);
      else
        out = InnerExpr::blaschke(std::move(zs));
      return true;
    }
    case InnerExpr::Tag::product: {
      std::vector<InnerExpr> fs = e.factors();
      for (auto& f : fs) {
        InnerExpr repl;
        if (try_remove_zero(f, a, tol, repl)) {
          f = repl;
          out = InnerExpr::product(std::move(fs));
          return true;
        }
      }
      return false;
    }
    case InnerExpr::Tag::reflect: {
      InnerExpr repl;
      if (!try_remove_zero(e.child(), -a, tol, repl)) return false;
      out = InnerExpr::reflect(std::move(repl));
      return true;
    }
    default:
      return false;  // zeros of shifts/compositions are not structural
  }
}

}  // namespace detail

// Split one copy of the Blaschke factor with zero a off the tree; the result
// times phi_a evaluates back to the original.
inline InnerExpr remove_zero(const InnerExpr& theta, cplx a, double tol = 1e-14) {
  InnerExpr out;
  if (!detail::try_remove_zero(theta, a, tol, out))
    throw Error("remove_zero: no structural Blaschke factor carries this zero");
  return out;
}

}  // namespace innerlevel
