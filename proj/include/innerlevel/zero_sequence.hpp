#pragma once

// Blaschke zero lists: finite explicit zeros, or parametric rules whose tail
// sums  sum_{j>N} (1 - |a_j|)  have closed-form upper bounds.  The bounds are
// what make truncated evaluation of the infinite products rigorous.

#include <algorithm>
#include <memory>
#include <vector>

#include "innerlevel/common.hpp"

namespace innerlevel {

class ZeroSequence {
 public:
  enum class Kind { explicit_list, geometric, factorial, negated_mirror };

  struct ExplicitZero {
    cplx a;
    int multiplicity = 1;
  };

  static ZeroSequence explicit_zeros(std::vector<ExplicitZero> zeros) {
    ZeroSequence s;
    s.kind_ = Kind::explicit_list;
    for (const auto& z : zeros) {
      if (std::abs(z.a) >= 1.0) throw Error("ZeroSequence: explicit zero with |a| >= 1");
      if (z.multiplicity < 1) throw Error("ZeroSequence: multiplicity must be >= 1");
    }
    s.list_ = std::move(zeros);
    return s;
  }

  // a_n = 1 - q^n, n >= 1; tail bound q^{N+1}/(1-q).
  static ZeroSequence geometric(double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error("ZeroSequence: geometric ratio must lie in (0,1)");
    ZeroSequence s;
    s.kind_ = Kind::geometric;
    s.q_ = q;
    return s;
  }

  // a_n = 1 - 1/n!, n >= 1 (first zero at the origin); tail bound 2/(N+1)!.
  static ZeroSequence factorial() {
    ZeroSequence s;
    s.kind_ = Kind::factorial;
    return s;
  }

  // Zeros a_n and -a_n for every base zero, interleaved.
  static ZeroSequence negated_mirror(ZeroSequence base) {
    if (base.kind_ == Kind::negated_mirror)
      throw Error("ZeroSequence: nested negated_mirror is not supported");
    ZeroSequence s;
    s.kind_ = Kind::negated_mirror;
    s.base_ = std::make_shared<ZeroSequence>(std::move(base));
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::explicit_list; }
  double q() const { return q_; }
  const ZeroSequence& base() const { return *base_; }
  const std::vector<ExplicitZero>& explicit_list() const { return list_; }
  const std::vector<std::size_t>& removed_indices() const { return removed_; }

  // Multiplicity-expanded length before removals (explicit kind only).
  std::size_t raw_count() const {
    if (kind_ != Kind::explicit_list) throw Error("ZeroSequence: infinite sequence has no count");
    std::size_t n = 0;
    for (const auto& z : list_) n += static_cast<std::size_t>(z.multiplicity);
    return n;
  }

  std::size_t finite_count() const { return raw_count() - removed_.size(); }

  // 1-based enumeration with multiplicities expanded and removals skipped.
  // Parametric entries that round to |a| == 1 in double precision are
  // returned as-is; evaluation treats such factors as exactly 1.
  cplx zero(std::size_t n) const {
    if (n == 0) throw Error("ZeroSequence: enumeration is 1-based");
    return raw_zero(surviving_raw_index(n));
  }

  // Upper bound for sum_{j>N} (1 - |a_j|) over the enumeration.  Removals
  // only shrink the true tail, so the bound of the unremoved sequence is
  // kept (still an upper bound).
  double tail_bound(std::size_t N) const {
    switch (kind_) {
      case Kind::explicit_list: {
        double s = 0.0;
        std::size_t idx = 0;
        for (const auto& z : list_)
          for (int m = 0; m < z.multiplicity; ++m)
            if (++idx > N) s += 1.0 - std::abs(z.a);
        return s;
      }
      case Kind::geometric:
        return std::pow(q_, static_cast<double>(N) + 1.0) / (1.0 - q_);
      case Kind::factorial: {
        if (N == 0) return 1.7182818284590455;  // e - 1, rounded up
        // sum_{j>N} 1/j! < 2/(N+1)!
        double ln = std::log(2.0) - std::lgamma(static_cast<double>(N) + 2.0);
        return std::exp(ln) * (1.0 + 1e-12);
      }
      case Kind::negated_mirror:
        return 2.0 * base_->tail_bound(N / 2);
    }
    throw Error("ZeroSequence: bad kind");
  }

  // Lower bound for min_{j>N} |xi - a_j| at a boundary point, used by the
  // boundary-evaluation tails.  Returns 0 when no positive bound is known.
  double tail_min_distance(BoundaryPoint xi, std::size_t N) const {
    cplx p = xi.point();
    switch (kind_) {
      case Kind::explicit_list: {
        double best = 4.0;
        std::size_t idx = 0;
        for (const auto& z : list_)
          for (int m = 0; m < z.multiplicity; ++m)
            if (++idx > N) best = std::min(best, std::abs(p - z.a));
        return best;  // 4.0 = "no tail" sentinel, larger than any disk chord
      }
      case Kind::geometric:
      case Kind::factorial: {
        // zeros are real, increasing, inside [a_{N+1}, 1)
        double lo = first_tail_radius(N);
        return distance_to_real_segment(p, lo, 1.0);
      }
      case Kind::negated_mirror: {
        if (base_->kind_ == Kind::explicit_list) {
          // base zero k occupies raw slots 2k-1 and 2k
          double best = 4.0;
          std::size_t idx = 0;
          for (const auto& z : base_->list_)
            for (int m = 0; m < z.multiplicity; ++m)
              if (++idx > N / 2) {
                best = std::min(best, std::abs(p - z.a));
                best = std::min(best, std::abs(p + z.a));
              }
          return best;
        }
        double lo = base_->first_tail_radius(N / 2);
        return std::min(distance_to_real_segment(p, lo, 1.0),
                        distance_to_real_segment(p, -1.0, -lo));
      }
    }
    throw Error("ZeroSequence: bad kind");
  }

  // Limit points of the zeros on the circle.
  std::vector<BoundaryPoint> accumulation_points() const {
    switch (kind_) {
      case Kind::explicit_list:
        return {};
      case Kind::geometric:
      case Kind::factorial:
        return {BoundaryPoint(0.0)};
      case Kind::negated_mirror: {
        std::vector<BoundaryPoint> out;
        for (const auto& b : base_->accumulation_points()) {
          push_unique(out, b);
          push_unique(out, BoundaryPoint(b.theta + kPi));
        }
        return out;
      }
    }
    throw Error("ZeroSequence: bad kind");
  }

  // Structural removal of one copy of a zero matching within tol.
  bool remove_zero(cplx a, double tol) {
    if (kind_ == Kind::explicit_list) {
      for (std::size_t i = 0; i < list_.size(); ++i) {
        if (std::abs(list_[i].a - a) <= tol) {
          if (--list_[i].multiplicity == 0) list_.erase(list_.begin() + static_cast<long>(i));
          return true;
        }
      }
      return false;
    }
    // parametric kinds: locate the raw index, record it as removed
    for (std::size_t n = 1; n <= kParametricSearchCap; ++n) {
      cplx zn = raw_zero(n);
      if (1.0 - std::abs(zn) <= 0.0) break;  // tail indistinguishable from 1
      if (std::abs(zn - a) <= tol) {
        if (std::find(removed_.begin(), removed_.end(), n) != removed_.end()) continue;
        removed_.push_back(n);
        std::sort(removed_.begin(), removed_.end());
        return true;
      }
    }
    return false;
  }

  void set_removed_indices(std::vector<std::size_t> removed) {
    if (kind_ == Kind::explicit_list && !removed.empty())
      throw Error("ZeroSequence: explicit lists edit their entries, not removal indices");
    std::sort(removed.begin(), removed.end());
    removed_ = std::move(removed);
  }

  // Radius of the first tail zero (parametric kinds; real zeros).
  double first_tail_radius(std::size_t N) const {
    switch (kind_) {
      case Kind::geometric:
        return 1.0 - std::pow(q_, static_cast<double>(N) + 1.0);
      case Kind::factorial:
        return 1.0 - std::exp(-std::lgamma(static_cast<double>(N) + 2.0));
      default:
        throw Error("ZeroSequence: first_tail_radius needs a real parametric kind");
    }
  }

 private:
  static constexpr std::size_t kParametricSearchCap = 4096;

  static void push_unique(std::vector<BoundaryPoint>& v, BoundaryPoint p) {
    for (const auto& q : v)
      if (arc_distance(q.theta, p.theta) < 1e-12) return;
    v.push_back(p);
  }

  static double distance_to_real_segment(cplx p, double lo, double hi) {
    double x = std::clamp(p.real(), lo, hi);
    return std::abs(p - cplx(x, 0.0));
  }

  cplx raw_zero(std::size_t n) const {
    switch (kind_) {
      case Kind::explicit_list: {
        std::size_t idx = 0;
        for (const auto& z : list_)
          for (int m = 0; m < z.multiplicity; ++m)
            if (++idx == n) return z.a;
        throw Error("ZeroSequence: index past end of explicit list");
      }
      case Kind::geometric:
        return cplx(1.0 - std::pow(q_, static_cast<double>(n)), 0.0);
      case Kind::factorial:
        return cplx(1.0 - std::exp(-std::lgamma(static_cast<double>(n) + 1.0)), 0.0);
      case Kind::negated_mirror: {
        cplx b = base_->raw_zero((n + 1) / 2);
        return (n % 2 == 1) ? b : -b;
      }
    }
    throw Error("ZeroSequence: bad kind");
  }

  // Map the n-th surviving position to its raw index.
  std::size_t surviving_raw_index(std::size_t n) const {
    std::size_t raw = n;
    for (std::size_t r : removed_) {
      if (r <= raw) ++raw;
      else break;
    }
    return raw;
  }

  Kind kind_ = Kind::explicit_list;
  std::vector<ExplicitZero> list_;
  double q_ = 0.5;
  std::shared_ptr<ZeroSequence> base_;
  std::vector<std::size_t> removed_;  // sorted raw indices (parametric kinds)
};

}  // namespace innerlevel
