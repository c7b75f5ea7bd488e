#pragma once

// Brute-force ground truth for the analytic constructions: fixed-step
// rollouts of bang-bang and random control profiles, grid labeling of the
// recursively feasible set, and finite-difference derivative checks.
//
// Everything here integrates the dynamics directly and never consults the
// envelope, alpha or the safe-set formulas it is used to check.

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "optcbf/model.hpp"
#include "optcbf/second_order.hpp"

namespace optcbf {

struct RolloutConfig {
  double dt = 1e-4;
  double horizon = 60.0;
  // Rollouts also stop once b exceeds this value.
  double violation_threshold = std::numeric_limits<double>::infinity();
  // Grid labeling: a cell is safe iff its braking peak is <= this.
  double safe_peak_tol = 1e-3;

  void validate() const;
};

struct RolloutResult {
  double max_b = 0.0;
  double terminal_bdot = 0.0;
  double elapsed = 0.0;
  bool hit_threshold = false;
  bool horizon_exhausted = false;
};

// Explicit Euler under u = -sign(bddot_ctrl) u_max until b' <= 0.
// Throws HorizonError if b' is still positive at the horizon.
RolloutResult full_braking_rollout(const BarrierSpec& spec,
                                   const ControlBounds& bounds,
                                   const StateVector& x0, double t0,
                                   const RolloutConfig& cfg);

// Piecewise-constant scalar control; the last segment is held afterwards.
struct ControlProfile {
  std::vector<double> segments;
  double segment_duration = 1.0;

  double at(double elapsed) const;
};

// Rolls `profile` out until b' <= 0, the horizon, or b > cutoff_b. A cutoff
// stop makes max_b a lower bound on the true peak.
RolloutResult profile_rollout(
    const BarrierSpec& spec, const StateVector& x0, double t0,
    const ControlProfile& profile, const RolloutConfig& cfg,
    double cutoff_b = std::numeric_limits<double>::infinity());

struct GridSpec {
  double b_min = -50.0;
  double b_max = 0.0;
  double bdot_min = 0.0;
  double bdot_max = 25.0;
  int b_count = 101;
  int bdot_count = 101;
  double t0 = 0.0;

  void validate() const;
  double b_at(int i) const;
  double bdot_at(int j) const;
};

struct GridCell {
  double b = 0.0;
  double bdot = 0.0;
  SafeSetLabel analytic = SafeSetLabel::kInteriorC2;
  double margin = 0.0;  // b'^2 + 2 I(b)
  bool rollout_safe = false;
  double rollout_peak = 0.0;
  std::string error;  // non-empty when the rollout failed

  bool agrees() const { return error.empty() && in_c2(analytic) == rollout_safe; }
};

struct GridReport {
  std::vector<GridCell> cells;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t errors = 0;
  // Largest |margin| over the disagreeing cells (0 when there are none).
  double max_disagreement_margin = 0.0;

  double agreement_fraction() const;
};

// Labels every (b, b') cell by a full-braking rollout and compares it with
// classify_c2. Requires spec.lift and b_max <= 0.
GridReport grid_safe_set(const BarrierSpec& spec, const ControlBounds& bounds,
                         const GridSpec& grid, const RolloutConfig& cfg,
                         double classify_tol = kDefaultClassifyTol);

// Columns: b,bdot,analytic_label,rollout_safe,margin,rollout_peak,error
void write_grid_csv(std::ostream& os, const GridReport& report);

struct MinimalityReport {
  bool holds = true;
  std::size_t profiles = 0;
  std::uint64_t seed = 0;
  double braking_peak = 0.0;
  // Smallest peak over the sampled profiles (+inf with no profiles).
  double min_profile_peak = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::size_t beaten_by = 0;  // profiles whose peak undercut braking
};

struct MinimalityOptions {
  int segments = 10;
  std::uint64_t seed = 20240601;
  // Allowed excess of the braking peak; <= 0 selects 10 * dt.
  double tolerance = 0.0;
};

// Samples random admissible profiles (segments uniform in [-u_max, u_max],
// each lasting 2 T_brake / segments) and checks that full braking attains
// the smallest peak of b. Requires b'(x0) > 0.
MinimalityReport sample_profile_minimality(const BarrierSpec& spec,
                                           const ControlBounds& bounds,
                                           const StateVector& x0, double t0,
                                           std::size_t n_profiles,
                                           const RolloutConfig& cfg,
                                           MinimalityOptions options = {});

struct FiniteDifferenceReport {
  double declared_bdot = 0.0;
  double measured_bdot = 0.0;
  double first_rel_error = 0.0;
  // Order-2 constraints only.
  std::optional<double> declared_bddot;
  std::optional<double> measured_bddot;
  std::optional<double> second_rel_error;
};

// Forward differences of b along the RK4 flow under a constant scalar u.
// Relative errors use max(1, |declared|) as the scale.
FiniteDifferenceReport finite_difference_check(const BarrierSpec& spec,
                                               const StateVector& x, double t,
                                               double u, double h);

}  // namespace optcbf
