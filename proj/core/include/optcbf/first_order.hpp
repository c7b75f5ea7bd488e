#pragma once

// Control-bound-aware barriers for order-1 constraints, each expressed as a
// half-space normal . u <= offset on the control.

#include <span>

#include "optcbf/model.hpp"

namespace optcbf {

struct HalfSpaceConstraint {
  ControlVector normal;
  double offset = 0.0;

  // A zero normal with a negative offset admits no control at all.
  bool infeasible() const;
  bool admits(const ControlVector& u) const { return normal.dot(u) <= offset; }
};

// |b| <= tol_b counts as being on the constraint boundary.
class BoundaryTolerance {
 public:
  explicit BoundaryTolerance(double tol_b);
  static BoundaryTolerance analytic() { return BoundaryTolerance(1e-9); }
  static BoundaryTolerance simulation() { return BoundaryTolerance(1e-6); }
  double value() const noexcept { return tol_b_; }

 private:
  double tol_b_;
};

// Largest admissible action set that still keeps b <= 0 invariant:
// interior  Lg b . u <= ||Lg b|| u_max  (the control bound itself),
// boundary  Lg b . u <= -Lf b.
// Throws OutsideSafeSetError for b > tol_b.
HalfSpaceConstraint optimal_zbf(const BarrierEvaluation& eval,
                                const ControlBounds& bounds,
                                BoundaryTolerance tol);

// Lg b . u <= -c1 b - Lf b.
HalfSpaceConstraint linear_cbf(const BarrierEvaluation& eval, double c1);

struct SlopeResult {
  double c1 = 0.0;
  // True when max_u b' <= 0 at every sample: the constraint never binds.
  bool non_binding = false;
};

// c1 = max over samples of max_u b', divided by eps. With this slope the
// linear CBF coincides with the optimal ZBF wherever b <= -eps.
SlopeResult epsilon_close_slope(const BarrierSpec& spec,
                                const ControlBounds& bounds, double eps,
                                std::span<const TimedState> samples);

struct FeasibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = false;
  // Set when some constraint had a zero normal and a negative offset.
  bool degenerate = false;

  double clamp(double u) const;
};

// Intersection of [-u_max, u_max] with each half-space (scalar control).
FeasibleInterval feasible_interval(
    std::span<const HalfSpaceConstraint> constraints,
    const ControlBounds& bounds);

}  // namespace optcbf
