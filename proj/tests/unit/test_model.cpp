#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "optcbf/error.hpp"
#include "optcbf/model.hpp"

namespace optcbf {
namespace {

BarrierSpec acc(double delta0, double delta_dot0, double u_max = 5.0,
                double margin = 1.0) {
  return acc_headway_barrier({10.0, ExogenousSignal::constant_speed(delta0, delta_dot0),
                              ControlBounds(u_max), margin});
}

TEST(EvalBarrier, AccAtEqualSpeeds) {
  const BarrierEvaluation e = eval_barrier(acc(1.0, 10.0), make_state({0.0, 10.0}), 0.0);
  EXPECT_EQ(e.order, 2);
  EXPECT_DOUBLE_EQ(e.b, -11.0);
  EXPECT_DOUBLE_EQ(e.bdot(), 0.0);
  EXPECT_DOUBLE_EQ(*e.bddot_drift, 0.0);
  EXPECT_DOUBLE_EQ(*e.bddot_ctrl, 1.0);
}

TEST(EvalBarrier, GapExactlyGammaIsOnBoundary) {
  const BarrierEvaluation e = eval_barrier(acc(1.0, 10.0), make_state({11.0, 3.0}), 0.0);
  EXPECT_DOUBLE_EQ(e.b, 0.0);
}

TEST(EvalBarrier, ClosingScenarioStart) {
  const BarrierEvaluation e = eval_barrier(acc(40.0, 1.0), make_state({0.0, 10.0}), 0.0);
  EXPECT_DOUBLE_EQ(e.b, -50.0);
  EXPECT_DOUBLE_EQ(e.bdot(), 9.0);
}

TEST(EvalBarrier, RejectsNegativeTimeAndNonFiniteState) {
  const BarrierSpec spec = acc(1.0, 10.0);
  EXPECT_THROW(eval_barrier(spec, make_state({0.0, 1.0}), -1.0), PreconditionError);
  EXPECT_THROW(
      eval_barrier(spec, make_state({std::numeric_limits<double>::quiet_NaN(), 1.0}), 0.0),
      PreconditionError);
}

TEST(EvalBarrier, NonFiniteBarrierValueNamesField) {
  BarrierSpec spec = acc(1.0, 10.0);
  spec.bddot_drift = [](const StateVector&, double) {
    return std::numeric_limits<double>::infinity();
  };
  try {
    eval_barrier(spec, make_state({0.0, 1.0}), 0.0);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& err) {
    EXPECT_EQ(err.field(), "bddot_drift");
  }
}

TEST(ExtremalRate, SecondOrderAcc) {
  const auto e = BarrierEvaluation::second_order(-10.0, 1.0, 0.0, 1.0);
  const ControlBounds bounds(5.0);
  EXPECT_DOUBLE_EQ(extremal_rate(e, bounds, Extreme::kMin, 2), -5.0);
  EXPECT_DOUBLE_EQ(extremal_rate(e, bounds, Extreme::kMax, 2), 5.0);
}

TEST(ExtremalRate, ZeroControlRowGivesDrift) {
  const auto e = BarrierEvaluation::first_order(-1.0, 2.5, make_control({0.0}));
  const ControlBounds bounds(5.0);
  EXPECT_DOUBLE_EQ(extremal_rate(e, bounds, Extreme::kMin, 1), 2.5);
  EXPECT_DOUBLE_EQ(extremal_rate(e, bounds, Extreme::kMax, 1), 2.5);
}

TEST(ExtremalRate, VectorControlUsesEuclideanNorm) {
  const auto e = BarrierEvaluation::first_order(-1.0, 1.0, make_control({3.0, 4.0}));
  const ControlBounds bounds(2.0);
  EXPECT_DOUBLE_EQ(extremal_rate(e, bounds, Extreme::kMax, 1), 11.0);
  EXPECT_DOUBLE_EQ(extremal_rate(e, bounds, Extreme::kMin, 1), -9.0);
}

TEST(ExtremalRate, ConsistentWithUncontrolledRate) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-20.0, 20.0);
  const ControlBounds bounds(5.0);
  for (int i = 0; i < 1000; ++i) {
    const auto e1 = BarrierEvaluation::first_order(-1.0, d(rng), make_control({d(rng)}));
    EXPECT_LE(extremal_rate(e1, bounds, Extreme::kMin, 1), e1.bdot_drift);
    EXPECT_GE(extremal_rate(e1, bounds, Extreme::kMax, 1), e1.bdot_drift);
    const auto e2 = BarrierEvaluation::second_order(-1.0, d(rng), d(rng), d(rng));
    EXPECT_LE(extremal_rate(e2, bounds, Extreme::kMin, 2), *e2.bddot_drift);
    EXPECT_GE(extremal_rate(e2, bounds, Extreme::kMax, 2), *e2.bddot_drift);
  }
}

std::vector<TimedState> acc_samples() {
  std::vector<TimedState> out;
  for (double p : {-20.0, 0.0, 15.0})
    for (double v : {0.0, 5.0, 12.0})
      for (double t : {0.0, 1.0, 7.5}) out.push_back({make_state({p, v}), t});
  return out;
}

TEST(ValidateAssumptions, AccWithAdequateAuthorityIsClean) {
  const auto samples = acc_samples();
  const AssumptionReport r = validate_assumptions(acc(40.0, 1.0), ControlBounds(5.0), samples);
  EXPECT_TRUE(r.ok());
}

TEST(ValidateAssumptions, WeakBrakingFlagsEveryState) {
  const auto samples = acc_samples();
  const AssumptionReport r =
      validate_assumptions(acc(40.0, 1.0, 0.5), ControlBounds(0.5), samples);
  EXPECT_EQ(r.authority_violations.size(), samples.size());
  EXPECT_TRUE(r.decomposition_mismatches.empty());
}

TEST(ValidateAssumptions, WrongDecompositionIsDetected) {
  BarrierSpec spec = acc(40.0, 1.0);
  spec.bdot_drift = [](const StateVector& x, double) { return 2.0 * x(1); };
  const auto samples = acc_samples();
  const AssumptionReport r = validate_assumptions(spec, ControlBounds(5.0), samples);
  ASSERT_FALSE(r.decomposition_mismatches.empty());
  EXPECT_EQ(r.decomposition_mismatches.front().field, "bdot");
}

// Forward differences of b along the flow converge to the declared rate at
// first order: with a constant lead acceleration the error is |b''| h / 2.
TEST(Reconstruction, ForwardDifferenceErrorIsFirstOrder) {
  const BarrierSpec spec = acc_headway_barrier(
      {10.0, ExogenousSignal::constant_acceleration(3.0, 4.0, 0.7), ControlBounds(5.0), 1.0});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-30.0, 30.0), vel(0.0, 20.0),
      tim(0.0, 5.0), ctl(-5.0, 5.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const StateVector x = make_state({pos(rng), vel(rng)});
    const double t = tim(rng);
    const ControlVector u = make_control({ctl(rng)});
    const BarrierEvaluation e = eval_barrier(spec, x, t);
    const double declared = e.bdot_drift;  // order 2: b' carries no control
    const auto err = [&](double h) {
      const StateVector x1 = rk4_step(spec.dynamics, x, u, h);
      return std::abs((spec.value(x1, t + h) - e.b) / h - declared);
    };
    const double e1 = err(1e-2);
    const double e2 = err(5e-3);
    if (std::abs(u(0) - 0.7) < 0.1) continue;
    ++checked;
    EXPECT_NEAR(e1 / e2, 2.0, 0.05) << "sample " << i;
    EXPECT_NEAR(e1, 0.5 * std::abs(u(0) - 0.7) * 1e-2, 1e-8);
  }
  EXPECT_GT(checked, 900);
}

TEST(ExogenousSignal, ConstantSpeedIsExactlyLinear) {
  const ExogenousSignal s = ExogenousSignal::constant_speed(1.0, 10.0);
  for (double t : {0.0, 0.5, 3.25, 17.0}) {
    for (double h : {1e-3, 0.125, 2.0}) {
      EXPECT_NEAR(s.position(t + h) - s.position(t), s.speed(t) * h, 1e-12);
    }
    EXPECT_EQ(s.acceleration(t), 0.0);
  }
  EXPECT_EQ(s.min_acceleration(), 0.0);
}

TEST(ExogenousSignal, WorstCaseBrakingStops) {
  const ExogenousSignal s = ExogenousSignal::worst_case_braking(0.0, 10.0, -2.0);
  EXPECT_DOUBLE_EQ(s.speed(2.0), 6.0);
  EXPECT_DOUBLE_EQ(s.position(2.0), 16.0);
  EXPECT_DOUBLE_EQ(s.speed(10.0), 0.0);
  EXPECT_DOUBLE_EQ(s.position(10.0), 25.0);
  EXPECT_DOUBLE_EQ(s.acceleration(1.0), -2.0);
  EXPECT_DOUBLE_EQ(s.acceleration(6.0), 0.0);
  EXPECT_DOUBLE_EQ(s.min_acceleration(), -2.0);
  EXPECT_THROW(ExogenousSignal::worst_case_braking(0.0, 1.0, 1.0), ParameterError);
}

TEST(ExogenousSignal, TabulatedIntegratesSpeeds) {
  const ExogenousSignal s = ExogenousSignal::tabulated(2.0, {0.0, 2.0, 2.0}, 1.0);
  EXPECT_DOUBLE_EQ(s.position(1.0), 3.0);
  EXPECT_DOUBLE_EQ(s.position(2.0), 5.0);
  EXPECT_DOUBLE_EQ(s.position(4.0), 9.0);
  EXPECT_DOUBLE_EQ(s.speed(0.5), 1.0);
  EXPECT_DOUBLE_EQ(s.acceleration(0.5), 2.0);
}

TEST(AccBrakingEnvelope, FoldsInLeadModel) {
  const ControlBounds bounds(5.0);
  EXPECT_EQ(acc_braking_envelope(bounds, ExogenousSignal::constant_speed(0.0, 1.0))
                .constant_value(),
            -5.0);
  EXPECT_EQ(acc_braking_envelope(bounds, ExogenousSignal::worst_case_braking(0.0, 10.0, -2.0))
                .constant_value(),
            -3.0);
}

TEST(ControlBounds, RejectsNonPositive) {
  EXPECT_THROW(ControlBounds(0.0), ParameterError);
  EXPECT_THROW(ControlBounds(-1.0), ParameterError);
  EXPECT_TRUE(ControlBounds(5.0).admits(make_control({3.0, 4.0})));
  EXPECT_FALSE(ControlBounds(5.0).admits(make_control({3.0, 4.1})));
}

TEST(Integrators, DoubleIntegratorSteps) {
  const ControlAffineDynamics di = double_integrator();
  const StateVector e = euler_step(di, make_state({0.0, 10.0}), make_control({-5.0}), 0.1);
  EXPECT_DOUBLE_EQ(e(0), 1.0);
  EXPECT_DOUBLE_EQ(e(1), 9.5);
  const StateVector r = rk4_step(di, make_state({0.0, 10.0}), make_control({-5.0}), 0.1);
  EXPECT_NEAR(r(0), 1.0 - 0.025, 1e-14);
  EXPECT_NEAR(r(1), 9.5, 1e-14);
}

}  // namespace
}  // namespace optcbf
