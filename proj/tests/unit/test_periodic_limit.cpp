#include <gtest/gtest.h>

#include <cmath>

#include "apmarkov/periodic_limit.hpp"
#include "frozen.hpp"

using namespace apmarkov;

namespace {
OUSpec constant_spec() {
  OUSpec spec;
  spec.g = TimeFunction::parse("1", Declarations{1.0, 1.0, 1.0});
  spec.lambda = spec.g;
  spec.gamma = 1.0;
  return spec;
}
}  // namespace

TEST(Skeleton, ConstantDriftInvariantIsHalf) {
  const auto inv = invariant_gaussian(constant_spec());
  EXPECT_NEAR(inv.variance, 0.5, 1e-10);
  EXPECT_EQ(inv.mean, 0.0);
}

TEST(Skeleton, NonContractingThrows) {
  EXPECT_THROW(invariant_gaussian(SkeletonMap{1.0, 0.5}), ConvergenceError);
}

TEST(Skeleton, PowerIterationMatchesAnalyticVariance) {
  const auto skel = skeleton_map(constant_spec());
  const Mesh mesh{-6.0, 6.0, 400};
  const auto K = KernelMatrix::gaussian(mesh, skel.a, skel.s0);
  EXPECT_LT(K.row_sum_defect(), 1e-12);
  const auto res = power_iteration_invariant(K);
  EXPECT_NEAR(res.measure.variance(), 0.5, 1e-3);
  EXPECT_LE(res.residual, 1e-13);
}

TEST(Skeleton, PowerIterationRejectsDefectiveRows) {
  const Mesh mesh{0.0, 1.0, 2};
  KernelMatrix k(mesh, {0.5, 0.4, 0.5, 0.5});
  EXPECT_THROW(power_iteration_invariant(k), std::invalid_argument);
}

TEST(Limit, ConstantDriftSquareIsHalf) {
  EXPECT_NEAR(limiting_value(constant_spec(), [](double x) { return x * x; }), 0.5, 1e-9);
  EXPECT_NEAR(limiting_value(constant_spec(), [](double) { return 1.0; }), 1.0, 1e-12);
}

TEST(Limit, DefaultModelMatchesPeriodicVarianceOracle) {
  const auto spec = default_ou_spec();
  EXPECT_NEAR(limiting_value(spec, [](double x) { return x * x; }), frozen::kDefaultOuSquareLimit, 1e-8);
}

TEST(Limit, InvariantUnderPeriodShiftOfOrigin) {
  const auto spec = default_ou_spec();
  LimitOptions a, b;
  b.s_origin = 3.0;
  const auto f = [](double x) { return std::cos(x) + x * x * x * x; };
  EXPECT_NEAR(limiting_value(spec, f, a), limiting_value(spec, f, b), 1e-9);
}
