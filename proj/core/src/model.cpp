#include "optcbf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "optcbf/error.hpp"

namespace optcbf {

namespace {

template <typename Vec>
Vec from_list(std::initializer_list<double> entries, int capacity) {
  if (static_cast<int>(entries.size()) > capacity) {
    throw PreconditionError("vector exceeds fixed capacity");
  }
  Vec v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) v(i++) = e;
  return v;
}

double checked(double value, const char* field, double t) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "barrier evaluator '" << field << "' returned " << value
       << " at t=" << t;
    throw EvaluationError(field, os.str());
  }
  return value;
}

double relative_error(double measured, double declared) {
  return std::abs(measured - declared) / std::max(1.0, std::abs(declared));
}

// d/dt of `field` along the flow under constant u. Central difference when
// the backward sample stays at t >= 0, otherwise a second-order forward
// stencil.
template <typename Field>
double flow_derivative(const BarrierSpec& spec, const Field& field,
                       const StateVector& x, double t, const ControlVector& u,
                       double h) {
  const StateVector x_plus = rk4_step(spec.dynamics, x, u, h);
  if (t - h >= 0.0) {
    const StateVector x_minus = rk4_step(spec.dynamics, x, u, -h);
    return (field(x_plus, t + h) - field(x_minus, t - h)) / (2.0 * h);
  }
  const StateVector x_plus2 = rk4_step(spec.dynamics, x_plus, u, h);
  return (-3.0 * field(x, t) + 4.0 * field(x_plus, t + h) -
          field(x_plus2, t + 2.0 * h)) /
         (2.0 * h);
}

}  // namespace

StateVector make_state(std::initializer_list<double> entries) {
  return from_list<StateVector>(entries, kMaxStateDim);
}

ControlVector make_control(std::initializer_list<double> entries) {
  return from_list<ControlVector>(entries, kMaxControlDim);
}

ControlBounds::ControlBounds(double u_max) : u_max_(u_max) {
  if (!(u_max > 0.0) || !std::isfinite(u_max)) {
    throw ParameterError("control bound u_max must be positive and finite");
  }
}

bool ControlBounds::admits(const ControlVector& u) const {
  return u.norm() <= u_max_;
}

ControlAffineDynamics::ControlAffineDynamics(int state_dim, int control_dim,
                                             DriftFn drift,
                                             InputMapFn input_map)
    : state_dim_(state_dim),
      control_dim_(control_dim),
      drift_(std::move(drift)),
      input_map_(std::move(input_map)) {
  if (state_dim <= 0 || state_dim > kMaxStateDim || control_dim <= 0 ||
      control_dim > kMaxControlDim) {
    throw ParameterError("dynamics dimensions out of range");
  }
  if (!drift_ || !input_map_) {
    throw ParameterError("dynamics evaluators must be set");
  }
}

StateVector ControlAffineDynamics::rate(const StateVector& x,
                                        const ControlVector& u) const {
  return drift_(x) + input_map_(x) * u;
}

StateVector euler_step(const ControlAffineDynamics& dynamics,
                       const StateVector& x, const ControlVector& u,
                       double dt) {
  return x + dt * dynamics.rate(x, u);
}

StateVector rk4_step(const ControlAffineDynamics& dynamics,
                     const StateVector& x, const ControlVector& u, double dt) {
  const StateVector k1 = dynamics.rate(x, u);
  const StateVector k2 = dynamics.rate(x + 0.5 * dt * k1, u);
  const StateVector k3 = dynamics.rate(x + 0.5 * dt * k2, u);
  const StateVector k4 = dynamics.rate(x + dt * k3, u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ControlAffineDynamics double_integrator() {
  return ControlAffineDynamics(
      2, 1,
      [](const StateVector& x) {
        StateVector f(2);
        f << x(1), 0.0;
        return f;
      },
      [](const StateVector&) {
        InputMatrix g(2, 1);
        g << 0.0, 1.0;
        return g;
      });
}

std::string to_string(LeadModelKind kind) {
  switch (kind) {
    case LeadModelKind::kConstantSpeed:
      return "constant-speed";
    case LeadModelKind::kConstantAcceleration:
      return "constant-acceleration";
    case LeadModelKind::kWorstCaseBraking:
      return "worst-case-braking";
    case LeadModelKind::kTabulated:
      return "tabulated-profile";
  }
  return "unknown";
}

std::optional<LeadModelKind> parse_lead_model_kind(const std::string& text) {
  for (auto kind :
       {LeadModelKind::kConstantSpeed, LeadModelKind::kConstantAcceleration,
        LeadModelKind::kWorstCaseBraking, LeadModelKind::kTabulated}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

ExogenousSignal::ExogenousSignal(LeadModelKind kind, double position0,
                                 double speed0, double accel)
    : kind_(kind), position0_(position0), speed0_(speed0), accel_(accel) {
  if (!std::isfinite(position0) || !std::isfinite(speed0) ||
      !std::isfinite(accel)) {
    throw ParameterError("exogenous signal parameters must be finite");
  }
}

ExogenousSignal ExogenousSignal::constant_speed(double position0,
                                                double speed0) {
  return ExogenousSignal(LeadModelKind::kConstantSpeed, position0, speed0, 0.0);
}

ExogenousSignal ExogenousSignal::constant_acceleration(double position0,
                                                       double speed0,
                                                       double acceleration) {
  return ExogenousSignal(LeadModelKind::kConstantAcceleration, position0,
                         speed0, acceleration);
}

ExogenousSignal ExogenousSignal::worst_case_braking(double position0,
                                                    double speed0,
                                                    double deceleration) {
  if (!(deceleration < 0.0)) {
    throw ParameterError("worst-case braking deceleration must be negative");
  }
  if (speed0 < 0.0) {
    throw ParameterError("worst-case braking requires a non-negative speed");
  }
  return ExogenousSignal(LeadModelKind::kWorstCaseBraking, position0, speed0,
                         deceleration);
}

ExogenousSignal ExogenousSignal::tabulated(double position0,
                                           std::vector<double> speeds,
                                           double sample_period) {
  if (speeds.empty()) throw ParameterError("speed table is empty");
  if (!(sample_period > 0.0)) {
    throw ParameterError("sample period must be positive");
  }
  ExogenousSignal s(LeadModelKind::kTabulated, position0, speeds.front(), 0.0);
  s.period_ = sample_period;
  s.cumulative_.assign(speeds.size(), 0.0);
  for (std::size_t k = 1; k < speeds.size(); ++k) {
    if (!std::isfinite(speeds[k])) {
      throw ParameterError("speed table entries must be finite");
    }
    s.cumulative_[k] =
        s.cumulative_[k - 1] + 0.5 * sample_period * (speeds[k - 1] + speeds[k]);
  }
  s.speeds_ = std::move(speeds);
  return s;
}

double ExogenousSignal::stop_time() const {
  return speed0_ > 0.0 ? speed0_ / -accel_ : 0.0;
}

double ExogenousSignal::position(double t) const {
  switch (kind_) {
    case LeadModelKind::kConstantSpeed:
      return position0_ + speed0_ * t;
    case LeadModelKind::kConstantAcceleration:
      return position0_ + speed0_ * t + 0.5 * accel_ * t * t;
    case LeadModelKind::kWorstCaseBraking: {
      const double tau = std::min(t, stop_time());
      return position0_ + speed0_ * tau + 0.5 * accel_ * tau * tau;
    }
    case LeadModelKind::kTabulated: {
      const std::size_t last = speeds_.size() - 1;
      if (t >= static_cast<double>(last) * period_) {
        return position0_ + cumulative_[last] +
               speeds_[last] * (t - static_cast<double>(last) * period_);
      }
      // t < 0 extrapolates the first segment.
      const std::size_t k =
          t <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(t / period_));
      const double tau = t - static_cast<double>(k) * period_;
      const double slope = (speeds_[k + 1] - speeds_[k]) / period_;
      return position0_ + cumulative_[k] + speeds_[k] * tau +
             0.5 * slope * tau * tau;
    }
  }
  return 0.0;
}

double ExogenousSignal::speed(double t) const {
  switch (kind_) {
    case LeadModelKind::kConstantSpeed:
      return speed0_;
    case LeadModelKind::kConstantAcceleration:
      return speed0_ + accel_ * t;
    case LeadModelKind::kWorstCaseBraking:
      return speed0_ + accel_ * std::min(t, stop_time());
    case LeadModelKind::kTabulated: {
      const std::size_t last = speeds_.size() - 1;
      if (t >= static_cast<double>(last) * period_) return speeds_[last];
      const std::size_t k =
          t <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(t / period_));
      const double tau = t - static_cast<double>(k) * period_;
      return speeds_[k] + (speeds_[k + 1] - speeds_[k]) * tau / period_;
    }
  }
  return 0.0;
}

double ExogenousSignal::acceleration(double t) const {
  switch (kind_) {
    case LeadModelKind::kConstantSpeed:
      return 0.0;
    case LeadModelKind::kConstantAcceleration:
      return accel_;
    case LeadModelKind::kWorstCaseBraking:
      return t < stop_time() ? accel_ : 0.0;
    case LeadModelKind::kTabulated: {
      const std::size_t last = speeds_.size() - 1;
      if (t >= static_cast<double>(last) * period_) return 0.0;
      const std::size_t k =
          t <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(t / period_));
      return (speeds_[k + 1] - speeds_[k]) / period_;
    }
  }
  return 0.0;
}

double ExogenousSignal::min_acceleration() const {
  switch (kind_) {
    case LeadModelKind::kConstantSpeed:
      return 0.0;
    case LeadModelKind::kConstantAcceleration:
      return accel_;
    case LeadModelKind::kWorstCaseBraking:
      return speed0_ > 0.0 ? accel_ : 0.0;
    case LeadModelKind::kTabulated: {
      double lowest = 0.0;  // held speed past the table
      for (std::size_t k = 0; k + 1 < speeds_.size(); ++k) {
        lowest = std::min(lowest, (speeds_[k + 1] - speeds_[k]) / period_);
      }
      return lowest;
    }
  }
  return 0.0;
}

EnvelopeFunction EnvelopeFunction::constant(double value) {
  if (!std::isfinite(value)) {
    throw ParameterError("envelope constant must be finite");
  }
  EnvelopeFunction env;
  env.constant_ = value;
  return env;
}

EnvelopeFunction EnvelopeFunction::from_function(
    std::function<double(double)> fn) {
  if (!fn) throw ParameterError("envelope evaluator must be set");
  EnvelopeFunction env;
  env.fn_ = std::move(fn);
  return env;
}

double EnvelopeFunction::operator()(double b) const {
  return constant_ ? *constant_ : fn_(b);
}

BarrierEvaluation BarrierEvaluation::first_order(double b, double bdot_drift,
                                                 ControlVector bdot_ctrl) {
  BarrierEvaluation e;
  e.order = 1;
  e.b = b;
  e.bdot_drift = bdot_drift;
  e.bdot_ctrl = std::move(bdot_ctrl);
  return e;
}

BarrierEvaluation BarrierEvaluation::second_order(double b, double bdot,
                                                  double bddot_drift,
                                                  double bddot_ctrl) {
  BarrierEvaluation e;
  e.order = 2;
  e.b = b;
  e.bdot_drift = bdot;
  e.bdot_ctrl = ControlVector::Zero(1);
  e.bddot_drift = bddot_drift;
  e.bddot_ctrl = bddot_ctrl;
  return e;
}

BarrierEvaluation eval_barrier(const BarrierSpec& spec, const StateVector& x,
                               double t) {
  if (!(t >= 0.0)) throw PreconditionError("eval_barrier requires t >= 0");
  if (!x.allFinite()) throw PreconditionError("state has non-finite entries");
  if (spec.order != 1 && spec.order != 2) {
    throw PreconditionError("barrier order must be 1 or 2");
  }
  const int n = spec.dynamics.control_dim();

  BarrierEvaluation e;
  e.order = spec.order;
  e.b = checked(spec.value(x, t), "b", t);
  e.bdot_drift = checked(spec.bdot_drift(x, t), "bdot_drift", t);

  if (spec.order == 1) {
    e.bdot_ctrl = spec.bdot_ctrl(x, t);
    if (e.bdot_ctrl.size() != n) {
      throw PreconditionError("bdot_ctrl length does not match control dim");
    }
    if (!e.bdot_ctrl.allFinite()) {
      throw EvaluationError("bdot_ctrl",
                            "barrier evaluator 'bdot_ctrl' returned a "
                            "non-finite entry");
    }
    return e;
  }

  e.bdot_ctrl = ControlVector::Zero(n);
  if (spec.bdot_ctrl) {
    const ControlVector row = spec.bdot_ctrl(x, t);
    if (row.size() != n || row.cwiseAbs().maxCoeff() != 0.0) {
      throw PreconditionError(
          "order-2 constraint must have a zero control row in b'");
    }
  }
  e.bddot_drift = checked(spec.bddot_drift(x, t), "bddot_drift", t);
  e.bddot_ctrl = checked(spec.bddot_ctrl(x, t), "bddot_ctrl", t);
  return e;
}

double extremal_rate(const BarrierEvaluation& eval, const ControlBounds& bounds,
                     Extreme which, int order) {
  if (order != eval.order) {
    throw PreconditionError("extremal_rate order does not match evaluation");
  }
  const double sign = which == Extreme::kMax ? 1.0 : -1.0;
  if (order == 1) {
    return eval.bdot_drift + sign * eval.bdot_ctrl.norm() * bounds.u_max();
  }
  return *eval.bddot_drift + sign * std::abs(*eval.bddot_ctrl) * bounds.u_max();
}

AssumptionReport validate_assumptions(const BarrierSpec& spec,
                                      const ControlBounds& bounds,
                                      std::span<const TimedState> samples,
                                      AssumptionCheckOptions options) {
  if (samples.empty()) {
    throw PreconditionError("validate_assumptions needs at least one sample");
  }
  const int n = spec.dynamics.control_dim();
  const double eps2 = spec.margin * spec.margin;
  const double h = options.fd_step;

  std::vector<ControlVector> probes{ControlVector::Zero(n)};
  for (int i = 0; i < n; ++i) {
    ControlVector e = ControlVector::Zero(n);
    e(i) = bounds.u_max();
    probes.push_back(e);
    probes.push_back(-e);
  }

  AssumptionReport report;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const TimedState& s = samples[k];
    const BarrierEvaluation e = eval_barrier(spec, s.x, s.t);

    const double lo = extremal_rate(e, bounds, Extreme::kMin, spec.order);
    const double hi = extremal_rate(e, bounds, Extreme::kMax, spec.order);
    if (lo > -eps2 || hi < 0.0) report.authority_violations.push_back({k, lo, hi});

    auto flag = [&](const char* field, const ControlVector& u, double declared,
                    double measured) {
      const double err = relative_error(measured, declared);
      if (err > options.rel_tol) {
        report.decomposition_mismatches.push_back(
            {k, field, u(0), declared, measured, err});
      }
    };

    for (const ControlVector& u : probes) {
      const double measured_bdot =
          flow_derivative(spec, spec.value, s.x, s.t, u, h);
      if (spec.order == 1) {
        flag("bdot", u, e.bdot_drift + e.bdot_ctrl.dot(u), measured_bdot);
        continue;
      }
      flag("bdot", u, e.bdot_drift, measured_bdot);
      const double measured_bddot =
          flow_derivative(spec, spec.bdot_drift, s.x, s.t, u, h);
      flag("bddot", u, *e.bddot_drift + *e.bddot_ctrl * u(0), measured_bddot);
    }
  }
  return report;
}

EnvelopeFunction acc_braking_envelope(const ControlBounds& bounds,
                                      const ExogenousSignal& lead) {
  return EnvelopeFunction::constant(-bounds.u_max() - lead.min_acceleration());
}

BarrierSpec acc_headway_barrier(const AccBarrierParams& params) {
  if (!(params.gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(params.margin > 0.0)) throw ParameterError("margin must be positive");
  const double gamma = params.gamma;
  const ExogenousSignal lead = params.lead;

  BarrierSpec spec;
  spec.order = 2;
  spec.dynamics = double_integrator();
  spec.value = [lead, gamma](const StateVector& x, double t) {
    return x(0) - lead.position(t) - gamma;
  };
  spec.bdot_drift = [lead](const StateVector& x, double t) {
    return x(1) - lead.speed(t);
  };
  spec.bdot_ctrl = [](const StateVector&, double) {
    return ControlVector::Zero(1).eval();
  };
  spec.bddot_drift = [lead](const StateVector&, double t) {
    return -lead.acceleration(t);
  };
  spec.bddot_ctrl = [](const StateVector&, double) { return 1.0; };
  spec.envelope = acc_braking_envelope(params.bounds, lead);
  spec.margin = params.margin;
  spec.lift = [lead, gamma](double b, double bdot, double t) {
    return make_state({b + lead.position(t) + gamma, bdot + lead.speed(t)});
  };
  return spec;
}

}  // namespace optcbf
