#include <gtest/gtest.h>

#include <random>

#include "optcbf/error.hpp"
#include "optcbf/filter.hpp"

namespace optcbf {
namespace {

QpSetup setup(double v, double v_star, double dt, double lo, double hi) {
  QpSetup s;
  s.v = v;
  s.v_star = v_star;
  s.dt = dt;
  s.lower = lo;
  s.upper = hi;
  s.u_max = 5.0;
  return s;
}

TEST(SolveAccQp, AtTarget) {
  const FilterResult r = solve_acc_qp(setup(10, 10, 0.1, -5, 5));
  EXPECT_EQ(r.u_applied, 0.0);
  EXPECT_FALSE(r.cbf_active);
  EXPECT_FALSE(r.saturated);
  EXPECT_FALSE(r.infeasible);
}

TEST(SolveAccQp, SaturatesAtControlBound) {
  const FilterResult r = solve_acc_qp(setup(5, 10, 0.1, -5, 5));
  EXPECT_DOUBLE_EQ(r.u_applied, 5.0);
  EXPECT_TRUE(r.saturated);
  EXPECT_FALSE(r.cbf_active);
}

TEST(SolveAccQp, BarrierBoundBinds) {
  const FilterResult r = solve_acc_qp(setup(10, 10, 0.1, -5, -2));
  EXPECT_DOUBLE_EQ(r.u_applied, -2.0);
  EXPECT_TRUE(r.cbf_active);
}

TEST(SolveAccQp, EmptyIntervalBrakesFully) {
  const FilterResult r = solve_acc_qp(setup(10, 10, 0.1, -5, -6));
  EXPECT_TRUE(r.infeasible);
  EXPECT_DOUBLE_EQ(r.u_applied, -5.0);
}

TEST(SolveAccQp, WithBarrierBuildsInterval) {
  const QpSetup s = QpSetup::with_barrier(10, 10, 0.1, 5.0, 7.5);
  EXPECT_DOUBLE_EQ(s.lower, -5.0);
  EXPECT_DOUBLE_EQ(s.upper, 5.0);
  const QpSetup t = QpSetup::with_barrier(10, 10, 0.1, 5.0, -1.5);
  EXPECT_DOUBLE_EQ(t.upper, -1.5);
}

TEST(SolveAccQp, RejectsBadStep) {
  EXPECT_THROW(solve_acc_qp(setup(10, 10, 0.0, -5, 5)), PreconditionError);
}

TEST(GenericScalarQp, Examples) {
  EXPECT_DOUBLE_EQ(solve_generic_scalar_qp(1.0, 0.0, -5, 5), 0.0);
  EXPECT_DOUBLE_EQ(solve_generic_scalar_qp(1.0, -20.0, -5, 5), 5.0);
  EXPECT_DOUBLE_EQ(solve_generic_scalar_qp(0.01, -1.0, -5, -2), -2.0);
  EXPECT_THROW(solve_generic_scalar_qp(0.0, 1.0, -5, 5), ParameterError);
  EXPECT_THROW(solve_generic_scalar_qp(1.0, 1.0, 1, -1), PreconditionError);
}

TEST(QpProperties, ClosedFormAgreesWithGenericAndSatisfiesKkt) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> speed(0.0, 30.0), step(1e-3, 0.5),
      lo(-10.0, 0.0), span(0.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const QpSetup s = setup(speed(rng), speed(rng), step(rng), 0.0, 0.0);
    QpSetup q = s;
    q.lower = lo(rng);
    q.upper = q.lower + span(rng);
    const double u = solve_acc_qp(q).u_applied;
    const double a = q.dt * q.dt;
    const double b_lin = 2.0 * q.dt * (q.v - q.v_star);
    ASSERT_NEAR(u, solve_generic_scalar_qp(a, b_lin, q.lower, q.upper), 1e-12);

    ASSERT_GE(u, q.lower);
    ASSERT_LE(u, q.upper);
    const double grad = 2.0 * a * u + b_lin;
    const double scale = 1e-9 * (std::abs(b_lin) + 1.0);
    if (u > q.lower && u < q.upper) {
      EXPECT_NEAR(grad, 0.0, scale);
    } else if (u == q.upper && u != q.lower) {
      EXPECT_LE(grad, scale);  // pushing up against the upper bound
    } else if (u == q.lower && u != q.upper) {
      EXPECT_GE(grad, -scale);
    }
  }
}

}  // namespace
}  // namespace optcbf
