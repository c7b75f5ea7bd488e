#include "optcbf/first_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "optcbf/error.hpp"

namespace optcbf {

namespace {

void require_first_order(const BarrierEvaluation& eval, const char* op) {
  if (eval.order != 1) {
    std::ostringstream os;
    os << op << " requires an order-1 constraint, got order " << eval.order;
    throw PreconditionError(os.str());
  }
}

}  // namespace

bool HalfSpaceConstraint::infeasible() const {
  return normal.cwiseAbs().maxCoeff() == 0.0 && offset < 0.0;
}

BoundaryTolerance::BoundaryTolerance(double tol_b) : tol_b_(tol_b) {
  if (!(tol_b > 0.0)) throw ParameterError("boundary tolerance must be > 0");
}

HalfSpaceConstraint optimal_zbf(const BarrierEvaluation& eval,
                                const ControlBounds& bounds,
                                BoundaryTolerance tol) {
  require_first_order(eval, "optimal_zbf");
  if (eval.b > tol.value()) {
    std::ostringstream os;
    os << "state is outside the safe set (b = " << eval.b << ")";
    throw OutsideSafeSetError(os.str());
  }
  HalfSpaceConstraint c{eval.bdot_ctrl, 0.0};
  if (eval.b < -tol.value()) {
    c.offset = eval.bdot_ctrl.norm() * bounds.u_max();
  } else {
    c.offset = -eval.bdot_drift;
  }
  return c;
}

HalfSpaceConstraint linear_cbf(const BarrierEvaluation& eval, double c1) {
  require_first_order(eval, "linear_cbf");
  if (!(c1 > 0.0)) throw ParameterError("linear CBF slope c1 must be > 0");
  return {eval.bdot_ctrl, -c1 * eval.b - eval.bdot_drift};
}

SlopeResult epsilon_close_slope(const BarrierSpec& spec,
                                const ControlBounds& bounds, double eps,
                                std::span<const TimedState> samples) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (samples.empty()) throw PreconditionError("no sample states given");
  if (spec.order != 1) {
    throw PreconditionError("epsilon_close_slope requires order 1");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const TimedState& s : samples) {
    const BarrierEvaluation e = eval_barrier(spec, s.x, s.t);
    worst = std::max(worst, extremal_rate(e, bounds, Extreme::kMax, 1));
  }
  if (worst <= 0.0) return {0.0, true};
  return {worst / eps, false};
}

double FeasibleInterval::clamp(double u) const {
  return std::clamp(u, lower, upper);
}

FeasibleInterval feasible_interval(
    std::span<const HalfSpaceConstraint> constraints,
    const ControlBounds& bounds) {
  FeasibleInterval out{-bounds.u_max(), bounds.u_max(), false, false};
  for (const HalfSpaceConstraint& c : constraints) {
    if (c.normal.size() != 1) {
      throw PreconditionError("feasible_interval needs scalar controls");
    }
    const double a = c.normal(0);
    if (a > 0.0) {
      out.upper = std::min(out.upper, c.offset / a);
    } else if (a < 0.0) {
      out.lower = std::max(out.lower, c.offset / a);
    } else if (c.offset < 0.0) {
      out.degenerate = true;
    }
  }
  out.empty = out.degenerate || out.upper < out.lower;
  return out;
}

}  // namespace optcbf
