#include "optcbf/filter.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "optcbf/error.hpp"

namespace optcbf {

QpSetup QpSetup::with_barrier(double v, double v_star, double dt, double u_max,
                              double cbf_upper) {
  return {v, v_star, dt, -u_max, std::min(u_max, cbf_upper), u_max};
}

FilterResult solve_acc_qp(const QpSetup& s) {
  if (!(s.dt > 0.0)) throw PreconditionError("QP step dt must be positive");
  if (std::isnan(s.lower) || std::isnan(s.upper)) {
    throw PreconditionError("QP bounds must not be NaN");
  }
  FilterResult r;
  if (s.upper < s.lower) {
    r.u_applied = s.lower;
    r.infeasible = true;
    r.saturated = s.lower == -s.u_max;
    spdlog::debug(
        "safety filter infeasible: CBF bound {} below lower bound {} (v={}); "
        "applying maximal braking",
        s.upper, s.lower, s.v);
    return r;
  }
  const double unconstrained = (s.v_star - s.v) / s.dt;
  r.u_applied = std::clamp(unconstrained, s.lower, s.upper);
  const bool at_upper = unconstrained > s.upper;
  const bool at_lower = unconstrained < s.lower;
  r.cbf_active = at_upper && s.upper < s.u_max;
  r.saturated = (at_upper && s.upper == s.u_max) ||
                (at_lower && s.lower == -s.u_max);
  return r;
}

double solve_generic_scalar_qp(double a, double b_lin, double lower,
                               double upper) {
  if (!(a > 0.0)) throw ParameterError("QP curvature a must be positive");
  if (lower > upper) throw PreconditionError("QP interval is empty");
  return std::clamp(-b_lin / (2.0 * a), lower, upper);
}

}  // namespace optcbf
