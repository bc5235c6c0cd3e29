#pragma once

// Moebius and pseudohyperbolic primitives on the unit disk: the elementary
// factor phi_a, the pseudohyperbolic metric rho, its disks (which are
// Euclidean disks), and a sampling test for containment of a Stolz cone in a
// union of pseudohyperbolic disks centered on the real axis.

#include <optional>
#include <vector>

#include "innerlevel/common.hpp"

namespace innerlevel {

// phi_a(z) = (|a|/a) (a - z) / (1 - conj(a) z) for a != 0, phi_0(z) = z.
// Maps the disk onto itself, swaps 0 and |a|, and phi_a(a) = 0.
inline cplx mobius_eval(cplx a, cplx z) {
  double am = std::abs(a);
  if (am >= 1.0) throw Error("mobius_eval: |a| must be < 1");
  if (am == 0.0) return z;
  cplx prefactor = cplx(am, 0.0) / a;
  return prefactor * (a - z) / (1.0 - std::conj(a) * z);
}

// rho(z, w) = |z - w| / |1 - conj(w) z|, in [0, 1) on the open disk.
inline double pseudo_distance(cplx z, cplx w) {
  return std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
}

inline double pseudo_distance(UnitDiskPoint z, UnitDiskPoint w) {
  return pseudo_distance(z.z, w.z);
}

struct PseudoDisk {
  UnitDiskPoint center;
  double radius = 0.5;  // in (0, 1)

  PseudoDisk() = default;
  PseudoDisk(UnitDiskPoint c, double r) : center(c), radius(r) {
    if (!(r > 0.0 && r < 1.0)) throw Error("PseudoDisk: radius must lie in (0,1)");
  }
};

struct EuclideanDisk {
  cplx center;
  double radius = 0.0;
};

// D_rho(z0, r) equals the Euclidean disk with
//   center  z0 (1 - r^2) / (1 - r^2 |z0|^2),
//   radius  r (1 - |z0|^2) / (1 - r^2 |z0|^2).
inline EuclideanDisk pseudo_disk_to_euclidean(const PseudoDisk& d) {
  double r = d.radius;
  double m2 = std::norm(d.center.z);
  double den = 1.0 - r * r * m2;
  return {d.center.z * ((1.0 - r * r) / den), r * (1.0 - m2) / den};
}

// Angular approach region with cusp at e^{i vertex_theta}: the points
// e^{i vertex_theta} (1 - s e^{i beta}) with |beta| < half_aperture, clipped
// to |z| >= inner_radius inside the disk.  half_aperture == 0 degenerates to
// the radial ray.
struct StolzCone {
  double vertex_theta = 0.0;
  double half_aperture = 0.1;  // sigma in [0, pi/2)
  double inner_radius = 0.5;   // r0 in (0, 1)

  StolzCone() = default;
  StolzCone(double theta, double sigma, double r0)
      : vertex_theta(theta), half_aperture(sigma), inner_radius(r0) {
    if (!(sigma >= 0.0 && sigma < kPi / 2))
      throw Error("StolzCone: half aperture must lie in [0, pi/2)");
    if (!(r0 > 0.0 && r0 < 1.0))
      throw Error("StolzCone: inner radius must lie in (0,1)");
  }
};

enum class ConeContainment { contained, not_contained, inconclusive };

struct ConeContainmentResult {
  ConeContainment status = ConeContainment::inconclusive;
  double worst_min_rho = 0.0;  // max over cone samples of min_x rho(z, x)
  cplx worst_point{0.0, 0.0};
  std::size_t samples_used = 0;
};

namespace detail {

// min over real x in (-1,1) of rho(z, x), refined from a coarse grid by
// ternary search between the bracketing grid nodes.
inline double min_rho_to_real_axis(cplx z, std::size_t x_grid) {
  std::vector<double> xs;
  xs.reserve(x_grid + 64);
  for (std::size_t i = 0; i < x_grid; ++i) {
    double t = (static_cast<double>(i) + 0.5) / static_cast<double>(x_grid);
    xs.push_back(2.0 * t - 1.0);
  }
  // dyadic refinement toward both ends; the minimizing x tracks Re z
  for (int k = 1; k <= 40; ++k) {
    double d = std::pow(2.0, -k);
    xs.push_back(1.0 - d);
    xs.push_back(d - 1.0);
  }
  double best = 2.0, bx = 0.0;
  for (double x : xs) {
    double r = pseudo_distance(z, cplx(x, 0.0));
    if (r < best) {
      best = r;
      bx = x;
    }
  }
  // local ternary refine around bx
  double lo = std::max(-1.0 + 1e-15, bx - 0.1), hi = std::min(1.0 - 1e-15, bx + 0.1);
  for (int it = 0; it < 80; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (pseudo_distance(z, cplx(m1, 0.0)) < pseudo_distance(z, cplx(m2, 0.0)))
      hi = m2;
    else
      lo = m1;
  }
  double xm = 0.5 * (lo + hi);
  return std::min(best, pseudo_distance(z, cplx(xm, 0.0)));
}

}  // namespace detail

struct ConeTestOptions {
  std::size_t x_grid = 1024;
  double boundary_tolerance = 1e-9;
  double max_abs = 1.0 - 1e-6;  // sampling depth toward the circle
};

// Sampling semidecision for  cone subset of  union over real x of
// D_rho(x, rho0).  Rotation invariance of rho reduces the test to vertex
// angle 0, so only the cone shape matters.
inline ConeContainmentResult cone_in_union_test(const StolzCone& cone, double rho0,
                                                std::size_t n_samples,
                                                const ConeTestOptions& opt = {}) {
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw Error("cone_in_union_test: rho0 must lie in (0,1)");
  if (n_samples < 100) throw Error("cone_in_union_test: need at least 100 samples");

  double sigma = cone.half_aperture;
  double r0 = cone.inner_radius;
  std::size_t n_beta = sigma == 0.0 ? 1 : std::max<std::size_t>(9, static_cast<std::size_t>(std::sqrt(double(n_samples) / 4.0)));
  std::size_t n_s = std::max<std::size_t>(16, n_samples / n_beta);

  ConeContainmentResult res;
  res.worst_min_rho = 0.0;
  for (std::size_t bi = 0; bi < n_beta; ++bi) {
    double beta = n_beta == 1 ? 0.0 : -sigma + 2.0 * sigma * double(bi) / double(n_beta - 1);
    double cb = std::cos(beta);
    // s range along the ray 1 - s e^{i beta}: |z| <= max_abs gives the lower
    // cap; |z| >= r0 (or disk exit) gives the upper cap.
    double s_lo = (1.0 - opt.max_abs) / cb;        // first-order entry depth
    double disc = cb * cb - (1.0 - r0 * r0);
    double s_hi = disc >= 0.0 ? cb - std::sqrt(disc) : 2.0 * cb * (1.0 - 1e-12);
    if (!(s_hi > s_lo)) continue;
    for (std::size_t si = 0; si < n_s; ++si) {
      // log spacing concentrates samples toward the cusp
      double t = double(si) / double(n_s - 1);
      double s = s_lo * std::pow(s_hi / s_lo, t);
      cplx z = 1.0 - s * std::polar(1.0, beta);
      if (std::abs(z) >= 1.0 - 1e-15 || std::abs(z) < r0 * (1.0 - 1e-12)) continue;
      ++res.samples_used;
      double m = detail::min_rho_to_real_axis(z, opt.x_grid);
      if (m > res.worst_min_rho) {
        res.worst_min_rho = m;
        res.worst_point = z;
      }
    }
  }
  if (res.worst_min_rho >= rho0 + opt.boundary_tolerance)
    res.status = ConeContainment::not_contained;
  else if (res.worst_min_rho >= rho0 - opt.boundary_tolerance)
    res.status = ConeContainment::inconclusive;
  else
    res.status = ConeContainment::contained;
  return res;
}

}  // namespace innerlevel
