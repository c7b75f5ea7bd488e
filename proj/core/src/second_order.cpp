#include "optcbf/second_order.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "optcbf/error.hpp"

namespace optcbf {

namespace detail {

namespace {

constexpr int kMaxDepth = 48;
constexpr int kMinDepth = 4;

struct SimpsonPanel {
  double lo, mid, hi;
  double f_lo, f_mid, f_hi;
  double whole;
};

double refine(const std::function<double(double)>& fn, const SimpsonPanel& p,
              double tol, int depth) {
  const double lm = 0.5 * (p.lo + p.mid);
  const double rm = 0.5 * (p.mid + p.hi);
  const double f_lm = fn(lm);
  const double f_rm = fn(rm);
  const double left = (p.mid - p.lo) / 6.0 * (p.f_lo + 4.0 * f_lm + p.f_mid);
  const double right = (p.hi - p.mid) / 6.0 * (p.f_mid + 4.0 * f_rm + p.f_hi);
  const double delta = left + right - p.whole;
  if (depth >= kMaxDepth ||
      (depth >= kMinDepth && std::abs(delta) <= 15.0 * tol)) {
    return left + right + delta / 15.0;
  }
  return refine(fn, {p.lo, lm, p.mid, p.f_lo, f_lm, p.f_mid, left}, 0.5 * tol,
                depth + 1) +
         refine(fn, {p.mid, rm, p.hi, p.f_mid, f_rm, p.f_hi, right}, 0.5 * tol,
                depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double lo,
                        double hi, double rel_tol, double abs_floor) {
  if (lo == hi) return 0.0;
  const double mid = 0.5 * (lo + hi);
  SimpsonPanel p{lo, mid, hi, fn(lo), fn(mid), fn(hi), 0.0};
  p.whole = (hi - lo) / 6.0 * (p.f_lo + 4.0 * p.f_mid + p.f_hi);
  const double tol = std::max(rel_tol * std::abs(p.whole), abs_floor);
  return refine(fn, p, tol, 0);
}

}  // namespace detail

namespace {

[[noreturn]] void envelope_violation(double b, double value) {
  std::ostringstream os;
  os << "braking envelope is " << value << " > 0 at b = " << b;
  throw EnvelopeViolationError(os.str());
}

void require_second_order(const BarrierEvaluation& eval, const char* op) {
  if (eval.order != 2 || !eval.bddot_drift || !eval.bddot_ctrl) {
    std::ostringstream os;
    os << op << " requires an order-2 evaluation";
    throw PreconditionError(os.str());
  }
}

}  // namespace

std::string to_string(SafeSetLabel label) {
  switch (label) {
    case SafeSetLabel::kInteriorC2:
      return "InteriorC2";
    case SafeSetLabel::kBoundaryC2:
      return "BoundaryC2";
    case SafeSetLabel::kOutsideC2WithinC1:
      return "OutsideC2WithinC1";
    case SafeSetLabel::kOutsideC1:
      return "OutsideC1";
  }
  return "unknown";
}

void OptimalCbfConfig::validate() const {
  if (!(c1 > 0.0)) throw ParameterError("c1 must be positive");
  if (!(b_floor > 0.0)) throw ParameterError("b_floor must be positive");
  if (!(quad_tol > 0.0)) throw ParameterError("quad_tol must be positive");
  if (!(classify_tol > 0.0)) {
    throw ParameterError("classify_tol must be positive");
  }
}

double shortest_line_integral(const EnvelopeFunction& envelope, double b,
                              double quad_tol) {
  if (!(b <= 0.0)) {
    throw PreconditionError("shortest_line_integral requires b <= 0");
  }
  if (b == 0.0) return 0.0;
  if (const auto c = envelope.constant_value()) {
    if (*c > 0.0) envelope_violation(b, *c);
    return *c * (0.0 - b);
  }
  const auto sample = [&envelope](double s) {
    const double value = envelope(s);
    if (!(value <= 0.0)) envelope_violation(s, value);
    return value;
  };
  return detail::adaptive_simpson(sample, b, 0.0, quad_tol, kQuadAbsFloor);
}

double alpha(const EnvelopeFunction& envelope, double b, double quad_tol) {
  // max() maps the -0 produced at b = 0 to +0.
  return std::sqrt(std::max(0.0, -2.0 * shortest_line_integral(envelope, b, quad_tol)));
}

double alpha_slope(const EnvelopeFunction& envelope, double b, double b_floor,
                   double quad_tol) {
  if (!(b < 0.0) && std::abs(b) >= b_floor) {
    throw PreconditionError("alpha_slope requires b < 0");
  }
  if (std::abs(b) < b_floor) {
    std::ostringstream os;
    os << "alpha_slope is singular at b = " << b
       << " (|b| < b_floor); use the boundary branch of switching_control";
    throw SingularityGuardError(os.str());
  }
  const double value = envelope(b);
  if (!(value <= 0.0)) envelope_violation(b, value);
  return value / alpha(envelope, b, quad_tol);
}

double stopping_margin(const BarrierEvaluation& eval,
                       const EnvelopeFunction& envelope, double quad_tol) {
  const double b = std::min(eval.b, 0.0);
  return eval.bdot() * eval.bdot() +
         2.0 * shortest_line_integral(envelope, b, quad_tol);
}

SafeSetLabel classify_c2(const BarrierEvaluation& eval,
                         const EnvelopeFunction& envelope, double tol) {
  require_second_order(eval, "classify_c2");
  const double b = eval.b;
  if (eval.bdot() < 0.0) {
    if (b < -tol) return SafeSetLabel::kInteriorC2;
    if (b <= tol) return SafeSetLabel::kBoundaryC2;
    return SafeSetLabel::kOutsideC1;
  }
  if (b > tol) return SafeSetLabel::kOutsideC1;
  const double m = stopping_margin(eval, envelope);
  if (m < -tol) return SafeSetLabel::kInteriorC2;
  if (std::abs(m) <= tol) return SafeSetLabel::kBoundaryC2;
  return b <= 0.0 ? SafeSetLabel::kOutsideC2WithinC1
                  : SafeSetLabel::kOutsideC1;
}

HalfSpaceConstraint reduced_constraint(const BarrierEvaluation& eval,
                                       const OptimalCbfConfig& cfg) {
  require_second_order(eval, "reduced_constraint");
  cfg.validate();
  if (eval.b >= cfg.b_floor) {
    throw OutsideSafeSetError("reduced_constraint requires b <= -b_floor");
  }
  if (*eval.bddot_ctrl == 0.0) {
    throw DegenerateConstraintError(
        "control coefficient of b'' is zero; no half-space on u exists");
  }
  const double a = alpha(cfg.envelope, eval.b, cfg.quad_tol);
  const double slope =
      alpha_slope(cfg.envelope, eval.b, cfg.b_floor, cfg.quad_tol);
  const double bdot = eval.bdot();
  const double offset =
      -cfg.c1 * (bdot - a) + slope * bdot - *eval.bddot_drift;
  return {make_control({*eval.bddot_ctrl}), offset};
}

double switching_control(const BarrierEvaluation& eval,
                         const OptimalCbfConfig& cfg,
                         const ControlBounds& bounds, double nominal_u) {
  require_second_order(eval, "switching_control");
  const SafeSetLabel label = classify_c2(eval, cfg.envelope, cfg.classify_tol);
  if (!in_c2(label)) {
    std::ostringstream os;
    os << "state outside C2 (" << to_string(label) << ", b = " << eval.b
       << ", b' = " << eval.bdot() << ")";
    throw SafetyViolationError(os.str());
  }
  const double ctrl = *eval.bddot_ctrl;
  if (ctrl == 0.0) {
    throw DegenerateConstraintError("control coefficient of b'' is zero");
  }
  const double brake = ctrl > 0.0 ? -bounds.u_max() : bounds.u_max();
  const bool in_band = std::abs(eval.b) < cfg.b_floor;
  if (label == SafeSetLabel::kBoundaryC2 || (in_band && eval.bdot() > 0.0)) {
    return brake;
  }
  if (in_band) return std::clamp(nominal_u, -bounds.u_max(), bounds.u_max());

  const std::array<HalfSpaceConstraint, 1> cs{reduced_constraint(eval, cfg)};
  const FeasibleInterval interval = feasible_interval(cs, bounds);
  if (interval.empty) return brake;
  return interval.clamp(nominal_u);
}

}  // namespace optcbf
