#include "optcbf/sim.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "optcbf/error.hpp"

namespace optcbf {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kOptimal:
      return "optimal";
    case ControllerKind::kLinear:
      return "linear";
    case ControllerKind::kNone:
      return "none";
  }
  return "unknown";
}

std::optional<ControllerKind> parse_controller_kind(const std::string& text) {
  for (auto kind : {ControllerKind::kOptimal, ControllerKind::kLinear,
                    ControllerKind::kNone}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

ExogenousSignal LeadModel::signal() const {
  switch (kind) {
    case LeadModelKind::kConstantSpeed:
      return ExogenousSignal::constant_speed(delta0, delta_dot0);
    case LeadModelKind::kConstantAcceleration:
      return ExogenousSignal::constant_acceleration(delta0, delta_dot0,
                                                    delta_ddot);
    case LeadModelKind::kWorstCaseBraking:
      return ExogenousSignal::worst_case_braking(delta0, delta_dot0,
                                                 delta_ddot);
    case LeadModelKind::kTabulated:
      break;
  }
  throw ParameterError("tabulated lead profiles cannot be built from a config");
}

void ScenarioConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (double v : {p0, v0, v_star, gamma, u_max, c1, cA, cB, dt, T_end,
                   lead.delta0, lead.delta_dot0, lead.delta_ddot}) {
    if (!finite(v)) throw ParameterError("scenario values must be finite");
  }
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(T_end > 0.0)) throw ParameterError("T_end must be positive");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(u_max > 0.0)) throw ParameterError("u_max must be positive");
  if (controller == ControllerKind::kOptimal && !(c1 > 0.0)) {
    throw ParameterError("c1 must be positive");
  }
  if (controller == ControllerKind::kLinear && !(cA > 0.0 && cB > 0.0)) {
    throw ParameterError("cA and cB must be positive");
  }
  if (lead.kind == LeadModelKind::kConstantSpeed && lead.delta_ddot != 0.0) {
    throw ParameterError("constant-speed lead requires delta_ddot = 0");
  }
  (void)lead.signal();
}

ScenarioConfig ScenarioConfig::table1_as_printed() {
  ScenarioConfig cfg;
  cfg.lead = {LeadModelKind::kConstantSpeed, 1.0, 10.0, 0.0};
  return cfg;
}

ScenarioConfig ScenarioConfig::closing() {
  ScenarioConfig cfg;
  cfg.lead = {LeadModelKind::kConstantSpeed, 40.0, 1.0, 0.0};
  return cfg;
}

AccState step(AccState state, double u, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("step requires dt > 0");
  return {state.p + state.v * dt, state.v + u * dt};
}

AccController::AccController(const ScenarioConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const ControlBounds bounds(cfg_.u_max);
  barrier_ = acc_headway_barrier({cfg_.gamma, cfg_.lead.signal(), bounds, 1.0});
  optimal_.envelope = barrier_.envelope;
  optimal_.c1 = cfg_.c1;
}

ControllerBound AccController::bound(AccState state, double t) const {
  ControllerBound out;
  if (cfg_.controller == ControllerKind::kNone) return out;

  const BarrierEvaluation e =
      eval_barrier(barrier_, make_state({state.p, state.v}), t);
  if (cfg_.controller == ControllerKind::kLinear) {
    out.enforced = true;
    out.upper = -cfg_.cB * e.bdot() - cfg_.cA * cfg_.cB * e.b;
    return out;
  }

  // h = b' - alpha(b) <= 0 is enforced everywhere in C2, not only while
  // closing in; otherwise the zero-order hold chatters across b' = 0 at the
  // boundary and b creeps upward by about dt u_max / 2 per second.
  out.enforced = true;
  if (e.bdot() <= 0.0 && std::abs(e.b) < optimal_.b_floor) {
    // alpha' is singular here; hold b' <= 0 as on the boundary of C1.
    out.upper = 0.0;
    return out;
  }
  const SafeSetLabel label =
      classify_c2(e, optimal_.envelope, optimal_.classify_tol);
  if (!in_c2(label)) {
    spdlog::debug("t={} state outside C2 ({}, b={}, b'={})", t,
                  to_string(label), e.b, e.bdot());
    out.c2_violation = true;
    out.upper = -cfg_.u_max;
    return out;
  }
  if (label == SafeSetLabel::kBoundaryC2 ||
      std::abs(e.b) < optimal_.b_floor) {
    out.boundary_branch = true;
    out.upper = -cfg_.u_max;
    return out;
  }
  const HalfSpaceConstraint hs = reduced_constraint(e, optimal_);
  out.upper = hs.offset / hs.normal(0);
  return out;
}

ControllerBound controller_bound(const ScenarioConfig& cfg, AccState state,
                                 double t) {
  return AccController(cfg).bound(state, t);
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const AccController controller(cfg);
  const ExogenousSignal lead = cfg.lead.signal();
  const auto n = static_cast<long long>(std::llround(cfg.T_end / cfg.dt));

  RunResult out;
  out.log.rows.reserve(static_cast<std::size_t>(n) + 1);
  Metrics& m = out.metrics;
  AccState x{cfg.p0, cfg.v0};
  for (long long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const double delta = lead.position(t);
    const double delta_dot = lead.speed(t);
    const double b = x.p - delta - cfg.gamma;
    const double bdot = x.v - delta_dot;

    if (!std::isfinite(x.p) || !std::isfinite(x.v)) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out.log.rows.push_back(
          {t, x.p, x.v, nan, delta, delta_dot, b, bdot, nan, false, false});
      m.aborted = true;
      spdlog::error("non-finite state at t={}; simulation aborted", t);
      break;
    }

    const ControllerBound bound = controller.bound(x, t);
    const FilterResult f = solve_acc_qp(
        QpSetup::with_barrier(x.v, cfg.v_star, cfg.dt, cfg.u_max, bound.upper));
    out.log.rows.push_back({t, x.p, x.v, f.u_applied, delta, delta_dot, b,
                            bdot, bound.upper, f.cbf_active, f.infeasible});

    m.max_b = std::max(m.max_b, b);
    m.min_u = std::min(m.min_u, f.u_applied);
    if (b > kViolationTolerance) ++m.violation_steps;
    if (f.infeasible) ++m.infeasible_steps;
    if (bound.c2_violation) ++m.c2_exit_steps;
    if (!m.braking_onset && f.u_applied < kBrakingOnsetThreshold) {
      m.braking_onset = t;
    }
    m.terminal_b = b;
    m.terminal_bdot = bdot;

    if (k < n) x = step(x, f.u_applied, cfg.dt);
  }

  if (m.infeasible_steps > 0) {
    spdlog::warn("{} controller: {} infeasible QP steps", to_string(cfg.controller),
                 m.infeasible_steps);
  }
  if (m.c2_exit_steps > 0) {
    spdlog::info("{} controller: {} steps outside C2", to_string(cfg.controller),
                 m.c2_exit_steps);
  }
  if (m.violation_steps > 0) {
    spdlog::warn("{} controller: {} steps with b > {}", to_string(cfg.controller),
                 m.violation_steps, kViolationTolerance);
  }
  return out;
}

namespace {

std::vector<BoundSample> bound_curve(const RunResult& run, double u_max) {
  std::vector<BoundSample> curve;
  curve.reserve(run.log.rows.size());
  for (const LogRow& r : run.log.rows) {
    curve.push_back({r.b, std::min(u_max, r.cbf_upper_bound)});
  }
  return curve;
}

}  // namespace

Comparison compare_scenarios(const ScenarioConfig& first,
                             const ScenarioConfig& second) {
  const bool same_physics =
      first.p0 == second.p0 && first.v0 == second.v0 &&
      first.v_star == second.v_star && first.gamma == second.gamma &&
      first.u_max == second.u_max && first.lead == second.lead;
  if (first.dt != second.dt || first.T_end != second.T_end) {
    throw ParameterError("compared scenarios must share dt and T_end");
  }
  if (!same_physics) {
    throw ParameterError("compared scenarios must share physical parameters");
  }

  Comparison c;
  c.first = run_scenario(first);
  c.second = run_scenario(second);
  const auto& a = c.first.metrics.braking_onset;
  const auto& b = c.second.metrics.braking_onset;
  if (a && b) c.onset_delta = *a - *b;
  c.max_b_delta = c.first.metrics.max_b - c.second.metrics.max_b;
  c.first_curve = bound_curve(c.first, first.u_max);
  c.second_curve = bound_curve(c.second, second.u_max);
  return c;
}

const char* const kTrajectoryCsvHeader =
    "t,p,v,u,delta,delta_dot,b,bdot,cbf_upper_bound,cbf_active,infeasible";

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  os << kTrajectoryCsvHeader << '\n';
  char buf[320];
  for (const LogRow& r : log.rows) {
    std::snprintf(buf, sizeof buf,
                  "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%d\n",
                  r.t, r.p, r.v, r.u, r.delta, r.delta_dot, r.b, r.bdot,
                  r.cbf_upper_bound, r.cbf_active ? 1 : 0,
                  r.infeasible ? 1 : 0);
    os << buf;
  }
}

void write_metrics(std::ostream& os, const Metrics& m) {
  os << "max_b=" << format_number(m.max_b) << '\n'
     << "terminal_b=" << format_number(m.terminal_b) << '\n'
     << "terminal_bdot=" << format_number(m.terminal_bdot) << '\n'
     << "braking_onset="
     << (m.braking_onset ? format_number(*m.braking_onset) : "none") << '\n'
     << "violation_steps=" << m.violation_steps << '\n'
     << "infeasible_steps=" << m.infeasible_steps << '\n'
     << "c2_exit_steps=" << m.c2_exit_steps << '\n'
     << "min_u=" << format_number(m.min_u) << '\n'
     << "aborted=" << (m.aborted ? 1 : 0) << '\n';
}

}  // namespace optcbf
