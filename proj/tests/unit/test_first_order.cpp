#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "optcbf/error.hpp"
#include "optcbf/first_order.hpp"

namespace optcbf {
namespace {

// x' = drift + u with b = x - 5.
BarrierSpec shifted_integrator(double drift) {
  BarrierSpec spec;
  spec.order = 1;
  spec.dynamics = ControlAffineDynamics(
      1, 1, [drift](const StateVector&) { return make_state({drift}); },
      [](const StateVector&) { return InputMatrix::Constant(1, 1, 1.0); });
  spec.value = [](const StateVector& x, double) { return x(0) - 5.0; };
  spec.bdot_drift = [drift](const StateVector&, double) { return drift; };
  spec.bdot_ctrl = [](const StateVector&, double) { return make_control({1.0}); };
  return spec;
}

std::vector<TimedState> samples_below(double top, int n) {
  std::vector<TimedState> out;
  for (int i = 0; i < n; ++i) out.push_back({make_state({top - 0.01 * i}), 0.0});
  return out;
}

FeasibleInterval interval_of(const HalfSpaceConstraint& c, const ControlBounds& b) {
  return feasible_interval(std::span(&c, 1), b);
}

const auto kTol = BoundaryTolerance::analytic();

TEST(OptimalZbf, InteriorAdmitsTheWholeControlSet) {
  const auto e = BarrierEvaluation::first_order(-2.0, 3.0, make_control({1.0}));
  const HalfSpaceConstraint c = optimal_zbf(e, ControlBounds(5.0), kTol);
  EXPECT_DOUBLE_EQ(c.normal(0), 1.0);
  EXPECT_DOUBLE_EQ(c.offset, 5.0);
}

TEST(OptimalZbf, BoundaryForcesNonPositiveRate) {
  const auto e = BarrierEvaluation::first_order(0.0, 3.0, make_control({1.0}));
  const HalfSpaceConstraint c = optimal_zbf(e, ControlBounds(5.0), kTol);
  EXPECT_DOUBLE_EQ(c.normal(0), 1.0);
  EXPECT_DOUBLE_EQ(c.offset, -3.0);
}

TEST(OptimalZbf, ControlIndependentConstraintIsTrivial) {
  const auto e = BarrierEvaluation::first_order(-1.0, 3.0, make_control({0.0}));
  const HalfSpaceConstraint c = optimal_zbf(e, ControlBounds(5.0), kTol);
  EXPECT_DOUBLE_EQ(c.normal(0), 0.0);
  EXPECT_DOUBLE_EQ(c.offset, 0.0);
  EXPECT_FALSE(c.infeasible());
}

TEST(OptimalZbf, OutsideSafeSetThrows) {
  const auto e = BarrierEvaluation::first_order(0.1, 0.0, make_control({1.0}));
  EXPECT_THROW(optimal_zbf(e, ControlBounds(5.0), kTol), OutsideSafeSetError);
}

TEST(LinearCbf, Examples) {
  const auto far = BarrierEvaluation::first_order(-2.0, 3.0, make_control({1.0}));
  EXPECT_DOUBLE_EQ(linear_cbf(far, 10.0).offset, 17.0);
  const auto edge = BarrierEvaluation::first_order(0.0, 3.0, make_control({1.0}));
  EXPECT_DOUBLE_EQ(linear_cbf(edge, 10.0).offset, -3.0);
  const auto near = BarrierEvaluation::first_order(-0.1, 3.0, make_control({1.0}));
  EXPECT_NEAR(linear_cbf(near, 80.0).offset, 5.0, 1e-12);
  EXPECT_THROW(linear_cbf(far, 0.0), ParameterError);
}

TEST(EpsilonCloseSlope, Examples) {
  const auto samples = samples_below(5.0, 50);
  const ControlBounds bounds(5.0);
  EXPECT_NEAR(epsilon_close_slope(shifted_integrator(3.0), bounds, 0.1, samples).c1, 80.0, 1e-12);
  EXPECT_NEAR(epsilon_close_slope(shifted_integrator(3.0), bounds, 1.0, samples).c1, 8.0, 1e-12);
  const SlopeResult never = epsilon_close_slope(shifted_integrator(-10.0), bounds, 0.1, samples);
  EXPECT_EQ(never.c1, 0.0);
  EXPECT_TRUE(never.non_binding);
}

TEST(FeasibleInterval, Examples) {
  const ControlBounds bounds(5.0);
  const HalfSpaceConstraint loose{make_control({1.0}), 5.0};
  const FeasibleInterval a = interval_of(loose, bounds);
  EXPECT_FALSE(a.empty);
  EXPECT_DOUBLE_EQ(a.lower, -5.0);
  EXPECT_DOUBLE_EQ(a.upper, 5.0);

  const HalfSpaceConstraint tight{make_control({1.0}), -3.0};
  const FeasibleInterval b = interval_of(tight, bounds);
  EXPECT_DOUBLE_EQ(b.lower, -5.0);
  EXPECT_DOUBLE_EQ(b.upper, -3.0);

  const HalfSpaceConstraint impossible{make_control({1.0}), -6.0};
  EXPECT_TRUE(interval_of(impossible, bounds).empty);

  const HalfSpaceConstraint flipped{make_control({-2.0}), 4.0};
  const FeasibleInterval c = interval_of(flipped, bounds);
  EXPECT_DOUBLE_EQ(c.lower, -2.0);
  EXPECT_DOUBLE_EQ(c.upper, 5.0);

  const HalfSpaceConstraint degenerate{make_control({0.0}), -1.0};
  const FeasibleInterval d = interval_of(degenerate, bounds);
  EXPECT_TRUE(d.empty);
  EXPECT_TRUE(d.degenerate);
}

// Interior states keep the full control set; boundary states stay feasible
// whenever some admissible control makes b' <= 0.
TEST(OptimalZbfProperties, FeasibleAndMaximal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> drift(-20.0, 20.0), gain(-3.0, 3.0),
      depth(1e-6, 50.0);
  const ControlBounds bounds(5.0);
  for (int i = 0; i < 2000; ++i) {
    const double lf = drift(rng);
    const double lg = gain(rng);
    const auto inner = BarrierEvaluation::first_order(-depth(rng), lf, make_control({lg}));
    const FeasibleInterval fi = interval_of(optimal_zbf(inner, bounds, kTol), bounds);
    ASSERT_FALSE(fi.empty);
    if (lg != 0.0) {
      EXPECT_DOUBLE_EQ(fi.lower, -5.0);
      EXPECT_DOUBLE_EQ(fi.upper, 5.0);
    }

    const auto edge = BarrierEvaluation::first_order(0.0, lf, make_control({lg}));
    const FeasibleInterval fb = interval_of(optimal_zbf(edge, bounds, kTol), bounds);
    const bool can_stop = extremal_rate(edge, bounds, Extreme::kMin, 1) <= 0.0;
    EXPECT_EQ(!fb.empty, can_stop) << "lf=" << lf << " lg=" << lg;
  }
}

TEST(ZeroingProperty, BothConstructionsForceNonPositiveRateAtBoundary) {
  const auto e = BarrierEvaluation::first_order(0.0, 2.0, make_control({0.5}));
  const ControlBounds bounds(5.0);
  for (const HalfSpaceConstraint& c : {optimal_zbf(e, bounds, kTol), linear_cbf(e, 7.0)}) {
    const FeasibleInterval fi = interval_of(c, bounds);
    ASSERT_FALSE(fi.empty);
    EXPECT_LE(e.bdot_drift + 0.5 * fi.upper, 1e-12);
  }
}

TEST(EpsilonCloseness, LinearMatchesOptimalAwayFromBoundary) {
  const BarrierSpec spec = shifted_integrator(3.0);
  const ControlBounds bounds(5.0);
  const double eps = 0.05;
  const auto samples = samples_below(5.0, 300);
  const double c1 = epsilon_close_slope(spec, bounds, eps, samples).c1;
  for (const TimedState& s : samples) {
    const BarrierEvaluation e = eval_barrier(spec, s.x, s.t);
    const FeasibleInterval lin = interval_of(linear_cbf(e, c1), bounds);
    const FeasibleInterval opt = interval_of(optimal_zbf(e, bounds, kTol), bounds);
    if (e.b <= -eps - 1e-12) {
      EXPECT_NEAR(lin.lower, opt.lower, 1e-12);
      EXPECT_NEAR(lin.upper, opt.upper, 1e-12) << "b=" << e.b;
    }
    if (e.b == 0.0) {
      EXPECT_NEAR(lin.upper, -3.0, 1e-12);
      EXPECT_NEAR(opt.upper, -3.0, 1e-12);
    }
  }
}

}  // namespace
}  // namespace optcbf
