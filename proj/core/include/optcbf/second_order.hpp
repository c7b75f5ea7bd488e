#pragma once

// Optimal CBF for order-2 constraints under a scalar control bound.
//
// The shortest line integral I(b) = integral_b^0 env(s) ds of the braking
// envelope defines the class-K-infinity function alpha(b) = sqrt(-2 I(b)) and
// the recursively feasible set C2 = {b' < 0, b <= 0} U {b' >= 0,
// b'^2 + 2 I(b) <= 0}. Enforcing b' <= alpha(b) is an order-1 constraint in
// h = b' - alpha(b), which reduced_constraint() turns into a half-space on u.

#include <functional>
#include <string>

#include "optcbf/first_order.hpp"
#include "optcbf/model.hpp"

namespace optcbf {

inline constexpr double kDefaultQuadTol = 1e-10;
inline constexpr double kQuadAbsFloor = 1e-14;
inline constexpr double kDefaultBFloor = 1e-6;
inline constexpr double kDefaultClassifyTol = 1e-6;

namespace detail {
// Adaptive Simpson quadrature of fn over [lo, hi] to
// max(rel_tol * |coarse estimate|, abs_floor).
double adaptive_simpson(const std::function<double(double)>& fn, double lo,
                        double hi, double rel_tol, double abs_floor);
}  // namespace detail

enum class SafeSetLabel {
  kInteriorC2,
  kBoundaryC2,
  kOutsideC2WithinC1,
  kOutsideC1,
};

std::string to_string(SafeSetLabel label);
inline bool in_c2(SafeSetLabel label) {
  return label == SafeSetLabel::kInteriorC2 ||
         label == SafeSetLabel::kBoundaryC2;
}

struct OptimalCbfConfig {
  EnvelopeFunction envelope = EnvelopeFunction::constant(-1.0);
  double c1 = 3.0;  // slope of the linear CBF on h = b' - alpha(b)
  double b_floor = kDefaultBFloor;
  double quad_tol = kDefaultQuadTol;
  double classify_tol = kDefaultClassifyTol;

  void validate() const;
};

// I(b) = integral from b to 0 of env. Requires b <= 0; I(b) <= 0.
// Throws EnvelopeViolationError if env is positive anywhere it is sampled.
double shortest_line_integral(const EnvelopeFunction& envelope, double b,
                              double quad_tol = kDefaultQuadTol);

double alpha(const EnvelopeFunction& envelope, double b,
             double quad_tol = kDefaultQuadTol);

// d alpha / d b = env(b) / alpha(b) < 0. Requires b < 0 with |b| >= b_floor.
double alpha_slope(const EnvelopeFunction& envelope, double b,
                   double b_floor = kDefaultBFloor,
                   double quad_tol = kDefaultQuadTol);

// M = b'^2 + 2 I(b); M <= 0 with b' >= 0 means the braking primitive stops
// before b reaches 0. For b > 0 the integral is taken at b = 0.
double stopping_margin(const BarrierEvaluation& eval,
                       const EnvelopeFunction& envelope,
                       double quad_tol = kDefaultQuadTol);

SafeSetLabel classify_c2(const BarrierEvaluation& eval,
                         const EnvelopeFunction& envelope,
                         double tol = kDefaultClassifyTol);

// bddot_ctrl u <= -c1 (b' - alpha(b)) + alpha'(b) b' - bddot_drift.
HalfSpaceConstraint reduced_constraint(const BarrierEvaluation& eval,
                                       const OptimalCbfConfig& cfg);

// Switching policy: the min-b'' primitive on the boundary of C2 (and inside
// the singularity band while b' > 0), otherwise the nominal control clamped
// into the reduced constraint and the control bounds.
double switching_control(const BarrierEvaluation& eval,
                         const OptimalCbfConfig& cfg,
                         const ControlBounds& bounds, double nominal_u);

}  // namespace optcbf
