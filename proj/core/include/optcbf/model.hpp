#pragma once

// Dynamical system, constraint, control-bound and exogenous-signal
// abstractions shared by every construction in the library.
//
// Conventions: constraints are written b(x, t) <= 0. For an order-1
// constraint b' = bdot_drift + bdot_ctrl . u; for an order-2 constraint the
// control enters only through b'' = bddot_drift + bddot_ctrl * u (scalar u).

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace optcbf {

inline constexpr int kMaxStateDim = 8;
inline constexpr int kMaxControlDim = 4;

// Fixed-capacity storage keeps rollout inner loops free of heap traffic.
using StateVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxStateDim, 1>;
using ControlVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxControlDim, 1>;
using InputMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                  kMaxStateDim, kMaxControlDim>;

StateVector make_state(std::initializer_list<double> entries);
ControlVector make_control(std::initializer_list<double> entries);

struct TimedState {
  StateVector x;
  double t = 0.0;
};

// Admissible controls are {u : ||u|| <= u_max}.
class ControlBounds {
 public:
  explicit ControlBounds(double u_max);
  double u_max() const noexcept { return u_max_; }
  bool admits(const ControlVector& u) const;

 private:
  double u_max_;
};

// x' = f(x) + g(x) u.
class ControlAffineDynamics {
 public:
  using DriftFn = std::function<StateVector(const StateVector&)>;
  using InputMapFn = std::function<InputMatrix(const StateVector&)>;

  ControlAffineDynamics() = default;
  ControlAffineDynamics(int state_dim, int control_dim, DriftFn drift,
                        InputMapFn input_map);

  int state_dim() const noexcept { return state_dim_; }
  int control_dim() const noexcept { return control_dim_; }

  StateVector drift(const StateVector& x) const { return drift_(x); }
  InputMatrix input_map(const StateVector& x) const { return input_map_(x); }
  StateVector rate(const StateVector& x, const ControlVector& u) const;

 private:
  int state_dim_ = 0;
  int control_dim_ = 0;
  DriftFn drift_;
  InputMapFn input_map_;
};

// Zero-order-hold steps under a constant control.
StateVector euler_step(const ControlAffineDynamics& dynamics,
                       const StateVector& x, const ControlVector& u, double dt);
StateVector rk4_step(const ControlAffineDynamics& dynamics,
                     const StateVector& x, const ControlVector& u, double dt);

// p' = v, v' = u with state (p, v).
ControlAffineDynamics double_integrator();

enum class LeadModelKind {
  kConstantSpeed,
  kConstantAcceleration,
  kWorstCaseBraking,
  kTabulated,
};

std::string to_string(LeadModelKind kind);
std::optional<LeadModelKind> parse_lead_model_kind(const std::string& text);

// Trajectory delta(t) of an exogenous agent (the lead vehicle) together with
// its first two derivatives. The three evaluators are exactly consistent.
class ExogenousSignal {
 public:
  static ExogenousSignal constant_speed(double position0, double speed0);
  static ExogenousSignal constant_acceleration(double position0, double speed0,
                                               double acceleration);
  // Brakes at `deceleration` (< 0) until it stops, then stays put.
  static ExogenousSignal worst_case_braking(double position0, double speed0,
                                            double deceleration);
  // Speed samples at k * sample_period, linearly interpolated; the last
  // speed is held past the end of the table.
  static ExogenousSignal tabulated(double position0, std::vector<double> speeds,
                                   double sample_period);

  LeadModelKind kind() const noexcept { return kind_; }
  double position0() const noexcept { return position0_; }
  double speed0() const noexcept { return speed0_; }
  double acceleration_parameter() const noexcept { return accel_; }

  double position(double t) const;
  double speed(double t) const;
  double acceleration(double t) const;

  // inf over t >= 0 of delta''(t).
  double min_acceleration() const;

 private:
  ExogenousSignal(LeadModelKind kind, double position0, double speed0,
                  double accel);

  double stop_time() const;

  LeadModelKind kind_;
  double position0_;
  double speed0_;
  double accel_;
  std::vector<double> speeds_;
  std::vector<double> cumulative_;  // position offset at each sample
  double period_ = 0.0;
};

// Lower envelope of b'' along the braking primitive, as a function of b.
class EnvelopeFunction {
 public:
  static EnvelopeFunction constant(double value);
  static EnvelopeFunction from_function(std::function<double(double)> fn);

  double operator()(double b) const;
  std::optional<double> constant_value() const noexcept { return constant_; }

 private:
  std::function<double(double)> fn_;
  std::optional<double> constant_;
};

// A constraint b(x, t) <= 0 on a control-affine system with its declared
// Lie-derivative decomposition. Users supply the derivatives; nothing here
// differentiates symbolically.
struct BarrierSpec {
  using ScalarField = std::function<double(const StateVector&, double)>;
  using RowField = std::function<ControlVector(const StateVector&, double)>;
  using LiftFn = std::function<StateVector(double b, double bdot, double t)>;

  int order = 1;
  ControlAffineDynamics dynamics;
  ScalarField value;
  // Control-free part of b', including the explicit time derivative.
  ScalarField bdot_drift;
  // Control coefficient row of b'. Required for order 1, must be zero (or
  // empty) for order 2.
  RowField bdot_ctrl;
  // Order 2 only: control-free part of b'' and the scalar control coefficient.
  ScalarField bddot_drift;
  ScalarField bddot_ctrl;
  EnvelopeFunction envelope = EnvelopeFunction::constant(-1.0);
  double margin = 1.0;  // epsilon in the Assumption-2 bound -epsilon^2
  // Optional map from barrier coordinates (b, b') at time t back to a state.
  LiftFn lift;
};

struct BarrierEvaluation {
  int order = 1;
  double b = 0.0;
  double bdot_drift = 0.0;
  ControlVector bdot_ctrl;
  std::optional<double> bddot_drift;
  std::optional<double> bddot_ctrl;

  static BarrierEvaluation first_order(double b, double bdot_drift,
                                       ControlVector bdot_ctrl);
  static BarrierEvaluation second_order(double b, double bdot,
                                        double bddot_drift, double bddot_ctrl);

  // b' for an order-2 constraint (control-free by definition).
  double bdot() const noexcept { return bdot_drift; }
};

BarrierEvaluation eval_barrier(const BarrierSpec& spec, const StateVector& x,
                               double t);

enum class Extreme { kMin, kMax };

// min / max over ||u|| <= u_max of b' (order 1) or b'' (order 2).
double extremal_rate(const BarrierEvaluation& eval, const ControlBounds& bounds,
                     Extreme which, int order);

struct AssumptionViolation {
  std::size_t sample_index = 0;
  double min_rate = 0.0;
  double max_rate = 0.0;
};

struct DecompositionMismatch {
  std::size_t sample_index = 0;
  std::string field;  // "bdot" or "bddot"
  double control = 0.0;  // first control component used in the probe
  double declared = 0.0;
  double measured = 0.0;
  double rel_error = 0.0;
};

struct AssumptionReport {
  std::vector<AssumptionViolation> authority_violations;
  std::vector<DecompositionMismatch> decomposition_mismatches;
  bool ok() const noexcept {
    return authority_violations.empty() && decomposition_mismatches.empty();
  }
};

struct AssumptionCheckOptions {
  double fd_step = 1e-5;
  double rel_tol = 1e-4;
};

// Flags states lacking the control authority required for safety and states
// where central differences along the flow disagree with the declared
// derivative decomposition.
AssumptionReport validate_assumptions(const BarrierSpec& spec,
                                      const ControlBounds& bounds,
                                      std::span<const TimedState> samples,
                                      AssumptionCheckOptions options = {});

// Headway constraint b = p - delta(t) - gamma on the double integrator.
struct AccBarrierParams {
  double gamma = 10.0;
  ExogenousSignal lead = ExogenousSignal::constant_speed(0.0, 0.0);
  ControlBounds bounds = ControlBounds(5.0);
  double margin = 1.0;
};

// Constant envelope -u_max - inf_t delta''(t): the braking authority that is
// guaranteed under the declared lead model.
EnvelopeFunction acc_braking_envelope(const ControlBounds& bounds,
                                      const ExogenousSignal& lead);

BarrierSpec acc_headway_barrier(const AccBarrierParams& params);

}  // namespace optcbf
