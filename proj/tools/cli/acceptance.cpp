#include "cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "optcbf/error.hpp"
#include "optcbf/filter.hpp"
#include "optcbf/first_order.hpp"
#include "optcbf/oracle.hpp"
#include "optcbf/second_order.hpp"
#include "optcbf/sim.hpp"

namespace optcbf::cli {

namespace {

constexpr double kUMax = 5.0;

template <typename Body>
CriterionResult timed(int id, std::string name, double limit, Body body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.time_limit = limit;
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& err) {
    detail << "exception: " << err.what();
    ok = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  if (r.seconds > limit) {
    detail << "; exceeded time limit";
    ok = false;
  }
  r.passed = ok;
  r.detail = detail.str();
  return r;
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Closing-speed ACC barrier with the default control bound.
BarrierSpec acc_spec() {
  const ScenarioConfig cfg = ScenarioConfig::closing();
  return acc_headway_barrier(
      {cfg.gamma, cfg.lead.signal(), ControlBounds(cfg.u_max), 1.0});
}

// Routes alpha through quadrature rather than the constant fast path.
EnvelopeFunction quadrature_envelope() {
  return EnvelopeFunction::from_function([](double) { return -kUMax; });
}

}  // namespace

CriterionResult check_class_k(const AcceptanceOptions& opts) {
  return timed(1, "class-K-infinity alpha", 1.0, [&](std::ostream& d) {
    const EnvelopeFunction env = quadrature_envelope();
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-100.0, 0.0);
    std::vector<double> bs(1000);
    for (double& b : bs) b = dist(rng);
    std::sort(bs.begin(), bs.end());

    const double at_zero = alpha(env, 0.0);
    std::size_t order_breaks = 0;
    std::size_t lower_breaks = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (double b : bs) {
      const double a = alpha(env, b);
      // bs ascending means -b descending, so alpha must strictly decrease.
      if (!(a < prev)) ++order_breaks;
      if (a < std::sqrt(2.0 * std::abs(b))) ++lower_breaks;
      prev = a;
    }
    d << "alpha(0)=" << g(at_zero) << " monotonicity breaks=" << order_breaks
      << " lower-bound breaks=" << lower_breaks;
    return at_zero == 0.0 && order_breaks == 0 && lower_breaks == 0;
  });
}

CriterionResult check_closed_form_alpha(const AcceptanceOptions&) {
  return timed(2, "ACC closed-form alpha", 1.0, [&](std::ostream& d) {
    const EnvelopeFunction env = quadrature_envelope();
    // Log-spaced so the small-|b| end is covered as densely as the far end.
    const double lo = std::log(1e-6);
    const double hi = std::log(100.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double b = -std::exp(lo + (hi - lo) * i / 999.0);
      const double exact = std::sqrt(-2.0 * kUMax * b);
      worst = std::max(worst, std::abs(alpha(env, b) - exact) / exact);
    }
    d << "max relative error=" << g(worst);
    return worst <= 1e-9;
  });
}

CriterionResult check_safe_set_grid(const AcceptanceOptions&) {
  return timed(3, "safe-set grid vs braking rollouts", 30.0,
               [&](std::ostream& d) {
                 const BarrierSpec spec = acc_spec();
                 RolloutConfig cfg;
                 cfg.dt = 1e-4;
                 const GridReport rep = grid_safe_set(
                     spec, ControlBounds(kUMax), GridSpec{}, cfg);
                 d << "agreement=" << g(100.0 * rep.agreement_fraction())
                   << "% disagreements=" << rep.disagreements
                   << " errors=" << rep.errors
                   << " max|M| on disagreement=" << g(rep.max_disagreement_margin);
                 return rep.errors == 0 && rep.agreement_fraction() >= 0.99 &&
                        rep.max_disagreement_margin <= 0.1;
               });
}

CriterionResult check_braking_minimality(const AcceptanceOptions& opts) {
  return timed(4, "full-braking minimality", 20.0, [&](std::ostream& d) {
    const BarrierSpec spec = acc_spec();
    const ControlBounds bounds(kUMax);
    RolloutConfig cfg;
    cfg.dt = 1e-4;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t failures = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 200; ++s) {
      const double b = -0.01 - 49.99 * unit(rng);
      const double bdot = std::sqrt(-2.0 * kUMax * b) * (0.01 + 0.99 * unit(rng));
      const StateVector x0 = spec.lift(b, bdot, 0.0);
      MinimalityOptions mo;
      mo.seed = opts.seed + static_cast<std::uint64_t>(s) + 1;
      const MinimalityReport rep =
          sample_profile_minimality(spec, bounds, x0, 0.0, 100, cfg, mo);
      if (!rep.holds) ++failures;
      worst_excess = std::max(worst_excess, rep.braking_peak - rep.min_profile_peak);
    }
    d << "states failing=" << failures
      << " worst braking-peak excess=" << g(worst_excess) << " (tol "
      << g(10.0 * cfg.dt) << ")";
    return failures == 0;
  });
}

CriterionResult check_closing_scenario(const AcceptanceOptions&) {
  return timed(5, "closing-scenario regression", 5.0, [&](std::ostream& d) {
    ScenarioConfig opt = ScenarioConfig::closing();
    opt.controller = ControllerKind::kOptimal;
    ScenarioConfig lin = opt;
    lin.controller = ControllerKind::kLinear;
    const Comparison c = compare_scenarios(opt, lin);
    const Metrics& mo = c.first.metrics;
    const Metrics& ml = c.second.metrics;

    const auto safe = [](const Metrics& m) { return m.max_b <= kViolationTolerance; };
    const auto settled = [](const Metrics& m) {
      return std::abs(m.terminal_bdot) <= 0.05 && std::abs(m.terminal_b) <= 0.5;
    };
    const bool a = safe(mo) && safe(ml);
    const bool b = settled(mo) && settled(ml);
    const bool onset = mo.braking_onset && ml.braking_onset &&
                       *ml.braking_onset < *mo.braking_onset;
    const bool bang = mo.min_u <= -0.99 * opt.u_max;

    const auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
    const auto onset_str = [](const Metrics& m) {
      return m.braking_onset ? g(*m.braking_onset) : std::string("none");
    };
    d << "(a) optimal " << mark(safe(mo)) << " max_b=" << g(mo.max_b)
      << ", linear " << mark(safe(ml)) << " max_b=" << g(ml.max_b)
      << "; (b) optimal " << mark(settled(mo)) << " b(T)=" << g(mo.terminal_b)
      << " b'(T)=" << g(mo.terminal_bdot) << ", linear " << mark(settled(ml))
      << " b(T)=" << g(ml.terminal_b) << " b'(T)=" << g(ml.terminal_bdot)
      << "; (c) " << mark(onset) << " onset optimal=" << onset_str(mo)
      << " linear=" << onset_str(ml) << "; (d) " << mark(bang)
      << " optimal min u=" << g(mo.min_u);
    return a && b && onset && bang;
  });
}

CriterionResult check_table1_as_printed(const AcceptanceOptions&) {
  return timed(6, "parameter table as printed", 2.0, [&](std::ostream& d) {
    bool ok = true;
    for (ControllerKind kind : {ControllerKind::kOptimal, ControllerKind::kLinear}) {
      ScenarioConfig cfg = ScenarioConfig::table1_as_printed();
      cfg.controller = kind;
      const RunResult run = run_scenario(cfg);
      double max_u = 0.0;
      double max_b_err = 0.0;
      for (const LogRow& r : run.log.rows) {
        max_u = std::max(max_u, std::abs(r.u));
        max_b_err = std::max(max_b_err, std::abs(r.b + 11.0));
      }
      d << to_string(kind) << ": max|u|=" << g(max_u)
        << " max|b+11|=" << g(max_b_err) << "; ";
      ok = ok && max_u == 0.0 && max_b_err <= 1e-9;
    }
    return ok;
  });
}

CriterionResult check_qp_oracle(const AcceptanceOptions& opts) {
  return timed(7, "closed-form QP vs generic interval QP", 1.0,
               [&](std::ostream& d) {
                 std::mt19937_64 rng(opts.seed);
                 std::uniform_real_distribution<double> speed(0.0, 30.0);
                 std::uniform_real_distribution<double> step(1e-3, 0.5);
                 std::uniform_real_distribution<double> lo(-10.0, 0.0);
                 std::uniform_real_distribution<double> span(0.0, 20.0);
                 double worst = 0.0;
                 for (int i = 0; i < 10000; ++i) {
                   QpSetup s;
                   s.v = speed(rng);
                   s.v_star = speed(rng);
                   s.dt = step(rng);
                   s.lower = lo(rng);
                   s.upper = s.lower + span(rng);
                   const double closed = solve_acc_qp(s).u_applied;
                   const double generic = solve_generic_scalar_qp(
                       s.dt * s.dt, 2.0 * s.dt * (s.v - s.v_star), s.lower,
                       s.upper);
                   worst = std::max(worst, std::abs(closed - generic));
                 }
                 d << "max |difference|=" << g(worst);
                 return worst <= 1e-12;
               });
}

CriterionResult check_epsilon_closeness(const AcceptanceOptions&) {
  return timed(8, "epsilon-close linear CBF", 1.0, [&](std::ostream& d) {
    constexpr double kEps = 0.01;
    BarrierSpec spec;
    spec.order = 1;
    spec.dynamics = ControlAffineDynamics(
        1, 1, [](const StateVector&) { return make_state({0.0}); },
        [](const StateVector&) { return InputMatrix::Constant(1, 1, 1.0); });
    spec.value = [](const StateVector& x, double) { return x(0) - 5.0; };
    spec.bdot_drift = [](const StateVector&, double) { return 0.0; };
    spec.bdot_ctrl = [](const StateVector&, double) { return make_control({1.0}); };

    const ControlBounds bounds(kUMax);
    std::vector<TimedState> samples;
    for (int i = 0; i <= 1000; ++i) {
      samples.push_back({make_state({5.0 - static_cast<double>(i) / 1000.0}), 0.0});
    }
    const SlopeResult slope = epsilon_close_slope(spec, bounds, kEps, samples);

    double worst_far = 0.0;
    double worst_boundary = 0.0;
    for (const TimedState& s : samples) {
      const BarrierEvaluation e = eval_barrier(spec, s.x, s.t);
      const HalfSpaceConstraint lin = linear_cbf(e, slope.c1);
      const HalfSpaceConstraint zbf =
          optimal_zbf(e, bounds, BoundaryTolerance::analytic());
      const FeasibleInterval il = feasible_interval(std::span(&lin, 1), bounds);
      const FeasibleInterval iz = feasible_interval(std::span(&zbf, 1), bounds);
      if (e.b <= -kEps) {
        worst_far = std::max({worst_far, std::abs(il.lower - iz.lower),
                              std::abs(il.upper - iz.upper),
                              std::abs(iz.lower + kUMax),
                              std::abs(iz.upper - kUMax)});
      } else if (e.b == 0.0) {
        worst_boundary =
            std::max({std::abs(il.upper), std::abs(iz.upper)});
      }
    }
    d << "c1=" << g(slope.c1) << " max interval gap (b<=-eps)=" << g(worst_far)
      << " boundary upper ends=" << g(worst_boundary);
    return worst_far <= 1e-12 && worst_boundary <= 1e-12;
  });
}

CriterionResult check_switching(const AcceptanceOptions& opts) {
  return timed(9, "switching controller", 1.0, [&](std::ostream& d) {
    OptimalCbfConfig cfg;
    cfg.envelope = EnvelopeFunction::constant(-kUMax);
    cfg.c1 = 3.0;
    const ControlBounds bounds(kUMax);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> nominal(-8.0, 8.0);

    std::size_t boundary_misses = 0;
    for (int i = 0; i < 100; ++i) {
      const double b = -1e-3 - 50.0 * unit(rng);
      const double bdot = std::sqrt(-2.0 * kUMax * b);
      const auto e = BarrierEvaluation::second_order(b, bdot, 0.0, 1.0);
      if (switching_control(e, cfg, bounds, nominal(rng)) != -kUMax) {
        ++boundary_misses;
      }
    }

    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double b = -0.2 - 49.8 * unit(rng);
      const double bdot = std::sqrt(-2.0 * kUMax * b - 1.0) * unit(rng);
      const double u_nom = nominal(rng);
      // Independent closed form of the reduced bound for a constant envelope.
      const double a = std::sqrt(-2.0 * kUMax * b);
      const double upper = -cfg.c1 * (bdot - a) - kUMax * bdot / a;
      const double expected = std::clamp(u_nom, -kUMax, std::min(kUMax, upper));
      const auto e = BarrierEvaluation::second_order(b, bdot, 0.0, 1.0);
      worst = std::max(worst,
                       std::abs(switching_control(e, cfg, bounds, u_nom) - expected));
    }
    d << "boundary states not braking=" << boundary_misses
      << " interior max |u - clamped nominal|=" << g(worst);
    return boundary_misses == 0 && worst <= 1e-9;
  });
}

const std::vector<CriterionFn>& acceptance_criteria() {
  static const std::vector<CriterionFn> all = {
      check_class_k,           check_closed_form_alpha, check_safe_set_grid,
      check_braking_minimality, check_closing_scenario, check_table1_as_printed,
      check_qp_oracle,         check_epsilon_closeness, check_switching};
  return all;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s criterion %d: ", r.passed ? "PASS" : "FAIL",
                r.id);
  char tail[64];
  std::snprintf(tail, sizeof tail, " [%.3f s, limit %.0f s]", r.seconds,
                r.time_limit);
  return std::string(head) + r.name + " | " + r.detail + tail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream& os) {
  std::vector<CriterionResult> results;
  for (const CriterionFn& fn : acceptance_criteria()) {
    results.push_back(fn(opts));
    os << format_result(results.back()) << std::endl;
  }
  return results;
}

}  // namespace optcbf::cli
