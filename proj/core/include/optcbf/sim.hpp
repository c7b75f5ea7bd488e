#pragma once

// Discrete-time closed loop for the adaptive-cruise-control scenario: a
// double-integrator follower behind a lead vehicle, the headway constraint
// b = p - delta(t) - gamma <= 0, and a safety-filtered speed tracker.

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "optcbf/filter.hpp"
#include "optcbf/model.hpp"
#include "optcbf/second_order.hpp"

namespace optcbf {

enum class ControllerKind { kOptimal, kLinear, kNone };

std::string to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(const std::string& text);

struct LeadModel {
  LeadModelKind kind = LeadModelKind::kConstantSpeed;
  double delta0 = 1.0;
  double delta_dot0 = 10.0;
  double delta_ddot = 0.0;

  ExogenousSignal signal() const;
  bool operator==(const LeadModel&) const = default;
};

struct ScenarioConfig {
  double p0 = 0.0;
  double v0 = 10.0;
  double v_star = 10.0;
  double gamma = 10.0;
  double u_max = 5.0;
  double c1 = 3.0;
  double cA = 100.0;
  double cB = 1.0;
  double dt = 1e-3;
  double T_end = 30.0;
  LeadModel lead;
  ControllerKind controller = ControllerKind::kOptimal;

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;

  // Parameter table exactly as published: zero relative speed.
  static ScenarioConfig table1_as_printed();
  // Same gains with a slower lead (delta0 = 40, lead speed 1) so the
  // follower closes in on the boundary.
  static ScenarioConfig closing();
};

inline constexpr double kViolationTolerance = 1e-3;
inline constexpr double kBrakingOnsetThreshold = -0.01;

struct AccState {
  double p = 0.0;
  double v = 0.0;
};

// p += v dt, v += u dt.
AccState step(AccState state, double u, double dt);

struct ControllerBound {
  double upper = std::numeric_limits<double>::infinity();
  bool enforced = false;        // the barrier contributed a bound this step
  bool boundary_branch = false; // full braking on or near the boundary of C2
  bool c2_violation = false;    // state was outside C2 (optimal only)
};

// Barrier bound on u for one configured controller. Construct once per run.
class AccController {
 public:
  explicit AccController(const ScenarioConfig& cfg);

  ControllerBound bound(AccState state, double t) const;
  const BarrierSpec& barrier() const noexcept { return barrier_; }
  const OptimalCbfConfig& optimal_config() const noexcept { return optimal_; }

 private:
  ScenarioConfig cfg_;
  BarrierSpec barrier_;
  OptimalCbfConfig optimal_;
};

ControllerBound controller_bound(const ScenarioConfig& cfg, AccState state,
                                 double t);

struct LogRow {
  double t, p, v, u, delta, delta_dot, b, bdot, cbf_upper_bound;
  bool cbf_active, infeasible;
};

struct TrajectoryLog {
  std::vector<LogRow> rows;
};

struct Metrics {
  double max_b = -std::numeric_limits<double>::infinity();
  double terminal_b = 0.0;
  double terminal_bdot = 0.0;
  std::optional<double> braking_onset;  // first t with u < -0.01
  std::size_t violation_steps = 0;      // steps with b > kViolationTolerance
  std::size_t infeasible_steps = 0;
  std::size_t c2_exit_steps = 0;
  double min_u = std::numeric_limits<double>::infinity();
  bool aborted = false;
};

struct RunResult {
  TrajectoryLog log;
  Metrics metrics;
};

RunResult run_scenario(const ScenarioConfig& cfg);

struct BoundSample {
  double b;
  double upper;  // effective upper bound min(u_max, barrier bound)
};

struct Comparison {
  RunResult first;
  RunResult second;
  // first onset minus second onset, when both runs brake.
  std::optional<double> onset_delta;
  double max_b_delta = 0.0;
  std::vector<BoundSample> first_curve;
  std::vector<BoundSample> second_curve;
};

// Both configs must share dt, T_end and all physical parameters.
Comparison compare_scenarios(const ScenarioConfig& first,
                             const ScenarioConfig& second);

// Header: t,p,v,u,delta,delta_dot,b,bdot,cbf_upper_bound,cbf_active,infeasible
void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);
extern const char* const kTrajectoryCsvHeader;

// Flat key=value block, one metric per line.
void write_metrics(std::ostream& os, const Metrics& metrics);

// Renders a number with 12 significant digits.
std::string format_number(double value);

}  // namespace optcbf
