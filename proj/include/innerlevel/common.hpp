#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace innerlevel {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Interior evaluation formulas blow up at |z| = 1.  Points this close to the
// circle must go through the boundary routines instead.
inline constexpr double kBoundaryGuard = 1e-12;

// Floor reported for error bounds of closed-form evaluations; we track
// truncation error rigorously but not floating-point roundoff.
inline constexpr double kRoundoffSlack = 1e-14;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested tolerance unreachable within the configured depth cap.
struct DepthError : Error {
  long long required_depth_estimate;
  DepthError(const std::string& msg, long long estimate)
      : Error(msg), required_depth_estimate(estimate) {}
};

// Boundary evaluation attempted inside the exclusion neighborhood of the
// singular set.
struct SingularProximityError : Error {
  double offending_theta;
  SingularProximityError(const std::string& msg, double theta)
      : Error(msg), offending_theta(theta) {}
};

// Normalize an angle into [0, 2*pi).
inline double normalize_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

// Arc-length distance between two angles on the unit circle, in [0, pi].
inline double arc_distance(double a, double b) {
  double d = std::fabs(normalize_angle(a) - normalize_angle(b));
  return std::min(d, kTwoPi - d);
}

// A point of the unit circle, kept as an angle so boundary formulas can use
// exact unimodular values.
struct BoundaryPoint {
  double theta = 0.0;  // radians, normalized to [0, 2*pi)

  BoundaryPoint() = default;
  explicit BoundaryPoint(double t) : theta(normalize_angle(t)) {}

  cplx point() const { return std::polar(1.0, theta); }
};

// A point of the open disk, guarded away from the circle.
struct UnitDiskPoint {
  cplx z;

  UnitDiskPoint() = default;
  explicit UnitDiskPoint(cplx v) : z(v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error("UnitDiskPoint: non-finite components");
    if (std::abs(v) >= 1.0 - kBoundaryGuard)
      throw Error("UnitDiskPoint: |z| must be < 1 - 1e-12");
  }
};

}  // namespace innerlevel
