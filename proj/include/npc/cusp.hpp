#pragma once

// Doubly warped cusp metrics F1(t)^2 dx^2 + F2(t)^2 dy^2 + dt^2 on T^2 x I:
// hyperbolic cusps, the interpolation between conformal types of the cross
// section, and the convex cap that makes the end a flat cylinder.

#include <array>
#include <functional>
#include <limits>
#include <string>

namespace npc::cusp {

struct Jet {
  double value;
  double d1;
  double d2;
};

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double t) const { return t >= lo && t <= hi; }
};

class WarpProfile {
 public:
  WarpProfile(std::string name, Interval domain, std::function<Jet(double)> eval)
      : name_(std::move(name)), domain_(domain), eval_(std::move(eval)) {}

  const std::string& name() const { return name_; }
  const Interval& domain() const { return domain_; }

  /// Throws ErrorCode::OutOfRange outside the domain.
  Jet operator()(double t) const;

  /// G(t) = F(s*t) / s: the metric built from G is the metric of F scaled by
  /// 1/s^2 (in t/s), so its curvatures are s^2 times those of F.
  WarpProfile rescaled(double s) const;

 private:
  std::string name_;
  Interval domain_;
  std::function<Jet(double)> eval_;
};

/// Smooth monotone step: 0 for u <= 0, 1 for u >= 1, built from exp(-1/u).
Jet smooth_step(double u);

/// F(t) = exp(-t) on [0, inf).
WarpProfile exponential_profile();

/// F(t) = c.
WarpProfile constant_profile(double c);

/// F(t) = exp(-t) * [phi + (1 - phi) * target], where phi = 1 on [0, s],
/// phi = 0 on [2s, inf) and s = phi_scale. Larger scales give smaller bounds
/// on phi' and phi''.
WarpProfile interpolation_profile(double target, double phi_scale);

struct CapProfile {
  WarpProfile profile;
  double t0;        // F = exp(-t) on [t0, join_begin]
  double join_begin;
  double join_end;  // F = flat level on [join_end, inf)
  double flat_level;
};

/// Convex nonincreasing profile equal to exp(-t) near t0 and constant for
/// large t. Requires 0 < flat_level < exp(-t0). The flat level is matched to
/// about 1e-12 relative.
CapProfile cap_profile(double t0, double flat_level);

struct DoublyWarpedMetric {
  WarpProfile f1;
  WarpProfile f2;
  Interval domain() const;
};

/// Sectional curvatures of the coordinate planes (x,t), (y,t), (x,y):
/// -F1''/F1, -F2''/F2, -F1'F2'/(F1 F2).
std::array<double, 3> sectional_curvatures(const DoublyWarpedMetric& m, double t);

/// The same three curvatures computed from the metric coefficients only:
/// fourth-order central differences of the metric give Christoffel symbols
/// and the Riemann tensor, step h.
/// Requires [t - 2h, t + 2h] inside the domain.
std::array<double, 3> fd_sectional_curvatures(const DoublyWarpedMetric& m, double t, double h);

struct NonpositivityReport {
  double max_curvature = -std::numeric_limits<double>::infinity();
  double argmax_t = 0.0;
  bool nonincreasing = true;  // F1' <= 0 and F2' <= 0 on the grid
  bool convex = true;         // F'' >= -1e-12 * F on the grid
  std::size_t grid = 0;

  bool certified() const { return nonincreasing && convex; }
};

/// Scans `grid` equally spaced points of [lo, hi].
NonpositivityReport verify_nonpositive(const DoublyWarpedMetric& m, std::size_t grid, double lo,
                                       double hi);

}  // namespace npc::cusp
