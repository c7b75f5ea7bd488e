#pragma once

// One-dimensional safety-filter QP for adaptive cruise control:
//   min_u (v + u dt - v_star)^2  s.t.  lower <= u <= upper.

#include <limits>

namespace optcbf {

struct QpSetup {
  double v = 0.0;
  double v_star = 0.0;
  double dt = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  // Control bound magnitude; lets the result tell a saturated actuator from a
  // binding barrier bound.
  double u_max = std::numeric_limits<double>::infinity();

  // lower = -u_max, upper = min(u_max, cbf_upper).
  static QpSetup with_barrier(double v, double v_star, double dt, double u_max,
                              double cbf_upper);
};

struct FilterResult {
  double u_applied = 0.0;
  bool cbf_active = false;
  bool saturated = false;
  bool infeasible = false;
};

// Closed-form minimizer clamp((v_star - v) / dt, lower, upper). An empty
// interval yields u = lower (maximal braking) with `infeasible` set.
FilterResult solve_acc_qp(const QpSetup& setup);

// argmin of a u^2 + b_lin u over [lower, upper]; the cross-check for
// solve_acc_qp with a = dt^2, b_lin = 2 dt (v - v_star).
double solve_generic_scalar_qp(double a, double b_lin, double lower,
                               double upper);

}  // namespace optcbf
