#include "optcbf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "optcbf/error.hpp"

namespace optcbf {

namespace {

struct RolloutControl {
  // Returns the scalar control for elapsed time `s` at state x, time t.
  virtual double operator()(const StateVector& x, double t, double s) const = 0;
  virtual ~RolloutControl() = default;
};

struct FullBraking final : RolloutControl {
  const BarrierSpec& spec;
  double u_max;
  FullBraking(const BarrierSpec& s, double u) : spec(s), u_max(u) {}
  double operator()(const StateVector& x, double t, double) const override {
    const double ctrl = spec.bddot_ctrl(x, t);
    if (ctrl == 0.0) {
      throw DegenerateConstraintError(
          "full braking undefined: control coefficient of b'' is zero");
    }
    return ctrl > 0.0 ? -u_max : u_max;
  }
};

struct ProfileControl final : RolloutControl {
  const ControlProfile& profile;
  explicit ProfileControl(const ControlProfile& p) : profile(p) {}
  double operator()(const StateVector&, double, double s) const override {
    return profile.at(s);
  }
};

RolloutResult integrate(const BarrierSpec& spec, const StateVector& x0,
                        double t0, const RolloutControl& control,
                        const RolloutConfig& cfg, double cutoff_b) {
  if (spec.order != 2) throw PreconditionError("rollouts need order 2");
  if (spec.dynamics.control_dim() != 1) {
    throw PreconditionError("rollouts need a scalar control");
  }
  cfg.validate();

  RolloutResult r;
  StateVector x = x0;
  double b = spec.value(x, t0);
  double bdot = spec.bdot_drift(x, t0);
  r.max_b = b;
  r.terminal_bdot = bdot;
  if (bdot <= 0.0) return r;

  const auto steps = static_cast<long long>(std::ceil(cfg.horizon / cfg.dt));
  ControlVector u(1);
  for (long long k = 0; k < steps; ++k) {
    const double s = static_cast<double>(k) * cfg.dt;
    const double t = t0 + s;
    u(0) = control(x, t, s);
    x += cfg.dt * spec.dynamics.rate(x, u);
    const double t_next = t0 + static_cast<double>(k + 1) * cfg.dt;
    b = spec.value(x, t_next);
    bdot = spec.bdot_drift(x, t_next);
    r.max_b = std::max(r.max_b, b);
    r.terminal_bdot = bdot;
    r.elapsed = t_next - t0;
    if (!std::isfinite(b) || !std::isfinite(bdot)) {
      throw EvaluationError("b", "rollout produced a non-finite barrier value");
    }
    if (bdot <= 0.0) return r;
    if (b > cfg.violation_threshold) {
      r.hit_threshold = true;
      return r;
    }
    if (b > cutoff_b) return r;
  }
  r.horizon_exhausted = true;
  return r;
}

}  // namespace

void RolloutConfig::validate() const {
  if (!(dt > 0.0)) throw ParameterError("rollout dt must be positive");
  if (!(horizon > 0.0)) throw ParameterError("rollout horizon must be positive");
}

RolloutResult full_braking_rollout(const BarrierSpec& spec,
                                   const ControlBounds& bounds,
                                   const StateVector& x0, double t0,
                                   const RolloutConfig& cfg) {
  const FullBraking control(spec, bounds.u_max());
  RolloutResult r = integrate(spec, x0, t0, control, cfg,
                              std::numeric_limits<double>::infinity());
  if (r.horizon_exhausted) {
    std::ostringstream os;
    os << "full-braking rollout still has b' = " << r.terminal_bdot
       << " > 0 after " << cfg.horizon << " s";
    throw HorizonError(os.str());
  }
  return r;
}

double ControlProfile::at(double elapsed) const {
  if (segments.empty()) return 0.0;
  const double idx = std::floor(elapsed / segment_duration);
  const auto k = static_cast<std::size_t>(std::max(idx, 0.0));
  return segments[std::min(k, segments.size() - 1)];
}

RolloutResult profile_rollout(const BarrierSpec& spec, const StateVector& x0,
                              double t0, const ControlProfile& profile,
                              const RolloutConfig& cfg, double cutoff_b) {
  if (!(profile.segment_duration > 0.0)) {
    throw ParameterError("profile segment duration must be positive");
  }
  return integrate(spec, x0, t0, ProfileControl(profile), cfg, cutoff_b);
}

void GridSpec::validate() const {
  if (!(b_min < b_max) || !(bdot_min < bdot_max)) {
    throw ParameterError("grid ranges must be nonempty");
  }
  if (b_count < 2 || bdot_count < 2) {
    throw ParameterError("grid needs at least 2 points per axis");
  }
}

double GridSpec::b_at(int i) const {
  return b_min + (b_max - b_min) * static_cast<double>(i) / (b_count - 1);
}

double GridSpec::bdot_at(int j) const {
  return bdot_min +
         (bdot_max - bdot_min) * static_cast<double>(j) / (bdot_count - 1);
}

double GridReport::agreement_fraction() const {
  const std::size_t total = cells.size();
  return total == 0 ? 1.0
                    : static_cast<double>(agreements) /
                          static_cast<double>(total);
}

GridReport grid_safe_set(const BarrierSpec& spec, const ControlBounds& bounds,
                         const GridSpec& grid, const RolloutConfig& cfg,
                         double classify_tol) {
  grid.validate();
  if (grid.b_max > 0.0) throw PreconditionError("grid must satisfy b <= 0");
  if (!spec.lift) {
    throw PreconditionError("grid_safe_set needs a barrier with a state lift");
  }

  GridReport report;
  report.cells.reserve(static_cast<std::size_t>(grid.b_count) *
                       static_cast<std::size_t>(grid.bdot_count));
  for (int i = 0; i < grid.b_count; ++i) {
    for (int j = 0; j < grid.bdot_count; ++j) {
      GridCell cell;
      cell.b = grid.b_at(i);
      cell.bdot = grid.bdot_at(j);
      const StateVector x0 = spec.lift(cell.b, cell.bdot, grid.t0);
      const BarrierEvaluation e = eval_barrier(spec, x0, grid.t0);
      cell.analytic = classify_c2(e, spec.envelope, classify_tol);
      cell.margin = stopping_margin(e, spec.envelope);
      try {
        const RolloutResult r =
            full_braking_rollout(spec, bounds, x0, grid.t0, cfg);
        cell.rollout_peak = r.max_b;
        cell.rollout_safe = r.max_b <= cfg.safe_peak_tol;
      } catch (const Error& err) {
        cell.error = err.what();
      }

      if (!cell.error.empty()) {
        ++report.errors;
      } else if (cell.agrees()) {
        ++report.agreements;
      } else {
        ++report.disagreements;
        report.max_disagreement_margin =
            std::max(report.max_disagreement_margin, std::abs(cell.margin));
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_grid_csv(std::ostream& os, const GridReport& report) {
  os << "b,bdot,analytic_label,rollout_safe,margin,rollout_peak,error\n";
  char buf[160];
  for (const GridCell& c : report.cells) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%s,%d,%.12g,%.12g,", c.b,
                  c.bdot, to_string(c.analytic).c_str(),
                  c.rollout_safe ? 1 : 0, c.margin, c.rollout_peak);
    os << buf;
    // Errors are free text; keep them on one CSV field.
    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << err << '\n';
  }
}

MinimalityReport sample_profile_minimality(const BarrierSpec& spec,
                                           const ControlBounds& bounds,
                                           const StateVector& x0, double t0,
                                           std::size_t n_profiles,
                                           const RolloutConfig& cfg,
                                           MinimalityOptions options) {
  if (!(spec.bdot_drift(x0, t0) > 0.0)) {
    throw PreconditionError("profile minimality needs b'(x0) > 0");
  }
  if (options.segments < 1) throw ParameterError("need at least one segment");

  MinimalityReport report;
  report.profiles = n_profiles;
  report.seed = options.seed;
  report.tolerance = options.tolerance > 0.0 ? options.tolerance : 10.0 * cfg.dt;

  const RolloutResult braking = full_braking_rollout(spec, bounds, x0, t0, cfg);
  report.braking_peak = braking.max_b;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> level(-bounds.u_max(), bounds.u_max());
  ControlProfile profile;
  profile.segment_duration =
      2.0 * std::max(braking.elapsed, cfg.dt) / options.segments;
  profile.segments.resize(static_cast<std::size_t>(options.segments));

  // Any profile that climbs past this level cannot undercut braking.
  const double cutoff = report.braking_peak + report.tolerance;
  for (std::size_t p = 0; p < n_profiles; ++p) {
    for (double& v : profile.segments) v = level(rng);
    const RolloutResult r = profile_rollout(spec, x0, t0, profile, cfg, cutoff);
    report.min_profile_peak = std::min(report.min_profile_peak, r.max_b);
    if (report.braking_peak > r.max_b + report.tolerance) ++report.beaten_by;
  }
  report.holds = report.beaten_by == 0;
  return report;
}

FiniteDifferenceReport finite_difference_check(const BarrierSpec& spec,
                                               const StateVector& x, double t,
                                               double u, double h) {
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be > 0");
  const ControlVector uc =
      ControlVector::Constant(spec.dynamics.control_dim(), u);
  const StateVector x1 = rk4_step(spec.dynamics, x, uc, h);
  const StateVector x2 = rk4_step(spec.dynamics, x1, uc, h);
  const double b0 = spec.value(x, t);
  const double b1 = spec.value(x1, t + h);
  const double b2 = spec.value(x2, t + 2.0 * h);

  const BarrierEvaluation e = eval_barrier(spec, x, t);
  const auto rel = [](double measured, double declared) {
    return std::abs(measured - declared) / std::max(1.0, std::abs(declared));
  };

  FiniteDifferenceReport r;
  r.declared_bdot = e.bdot_drift + e.bdot_ctrl.dot(uc);
  r.measured_bdot = (b1 - b0) / h;
  r.first_rel_error = rel(r.measured_bdot, r.declared_bdot);
  if (e.order == 2) {
    r.declared_bddot = *e.bddot_drift + *e.bddot_ctrl * u;
    r.measured_bddot = (b2 - 2.0 * b1 + b0) / (h * h);
    r.second_rel_error = rel(*r.measured_bddot, *r.declared_bddot);
  }
  return r;
}

}  // namespace optcbf
