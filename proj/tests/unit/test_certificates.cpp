#include <gtest/gtest.h>

#include <cmath>

#include "apmarkov/certificates.hpp"
#include "gaussian.hpp"

using namespace apmarkov;

namespace {
GaussianKernel unit_kernel() { return ou_kernel(TimeFunction::constant(1.0)); }
}  // namespace

TEST(Drift, AnalyticOuCertificateValidates) {
  const auto cert = check_drift(unit_kernel(), LyapunovFunction::quadratic(), 0.0, 1.0, 0.5, 0.94, 1.6);
  EXPECT_TRUE(cert.valid);
  EXPECT_LE(cert.max_residual, 0.0);
}

TEST(Drift, TightThetaFails) {
  const auto cert = check_drift(unit_kernel(), LyapunovFunction::quadratic(), 0.0, 1.0, 0.1, 0.94, 1.6);
  EXPECT_FALSE(cert.valid);
  EXPECT_GT(cert.max_residual, 0.0);
}

TEST(Drift, SuggestedSetMakesTheCertificateHold) {
  const auto tr = transition_params(TimeFunction::constant(1.0), 0.0, 1.0);
  const double k = suggest_drift_set(tr, 0.5);
  EXPECT_NEAR(k, std::sqrt((1 + oracle::ou_variance(1, 1) - 0.5) / (0.5 - std::exp(-2.0))), 1e-12);
  const double C = 1 + tr.variance() - 0.5;
  EXPECT_TRUE(check_drift(unit_kernel(), LyapunovFunction::quadratic(), 0.0, 1.0, 0.5, C, k + 1e-9).valid);
  EXPECT_THROW(suggest_drift_set(tr, 0.1), std::invalid_argument);
}

TEST(Drift, QuadratureLyapunovAgreesWithClosedForm) {
  const auto q = LyapunovFunction::quadratic();
  const auto g = LyapunovFunction::from_function("1+x^2", [](double x) { return 1 + x * x; });
  for (double m : {-2.0, 0.0, 0.7}) EXPECT_NEAR(q.gaussian_expectation(m, 0.6), g.gaussian_expectation(m, 0.6), 1e-12);
}

TEST(Growth, RatioAndMajBound) {
  const double growth = check_growth(unit_kernel(), LyapunovFunction::quadratic(), 0.0, {0.25, 0.5, 1.0});
  // P_t ψ / ψ ≤ 1 + σ² at x = 0, its maximum.
  EXPECT_NEAR(growth, 1 + oracle::ou_variance(1, 1.0), 1e-12);
  EXPECT_NEAR(maj_bound(0.5, 1.0), 3.0, 1e-15);
}

TEST(Minorization, CenteredClassGivesScaleRatio) {
  const auto cert = gaussian_class_minorization(0.0, 0.4, 0.9);
  EXPECT_NEAR(cert.c, 0.4 / 0.9, 1e-9);
  EXPECT_EQ(cert.violations, 0u);
  EXPECT_EQ(cert.samples_checked, 1000u);
  EXPECT_GE(cert.worst_margin, 0.0);
}

TEST(Minorization, ShiftedClassDominatesSamples) {
  const auto cert = gaussian_class_minorization(1.2, 0.5, 0.8);
  EXPECT_GT(cert.c, 0.0);
  EXPECT_LT(cert.c, 0.5 / 0.8);
  EXPECT_EQ(cert.violations, 0u);
  EXPECT_NEAR(integrate(cert.nu_density, -12.0, 12.0), 1.0, 1e-8);
}

TEST(Minorization, OuDoeblinCheck) {
  const auto k = ou_kernel(default_ou_spec().lambda);
  const std::vector<double> s_values{0.0, 0.25, 0.5, 0.75};
  const auto cert = ou_minorization_certificate(k, 1.6, s_values, 1.0);
  EXPECT_GT(cert.c, 0.0);
  EXPECT_EQ(cert.violations, 0u);
  const auto rep = doeblin_from_minorization(cert, s_values, {-1.6, 0.0, 1.6}, k);
  EXPECT_TRUE(rep.valid);
  EXPECT_FALSE(rep.degenerate);
  // A probe outside K is not covered by the certificate.
  EXPECT_FALSE(doeblin_from_minorization(cert, s_values, {6.0}, k).valid);
}

TEST(Contraction, GaussianEvolutionDecaysAtTheDriftRate) {
  const Mesh mesh{-8.0, 8.0, 320};
  const auto evolve = gaussian_mesh_evolution(unit_kernel(), 0.0);
  const auto mu1 = MeshMeasure::point_mass(mesh, -2.0);
  const auto mu2 = MeshMeasure::point_mass(mesh, 2.0);
  const auto fit = contraction_rate_fit(evolve, mu1, mu2, [](double) { return 1.0; }, {2.0, 3.0, 4.0, 5.0});
  EXPECT_FALSE(fit.skipped);
  // TV(N(−2m, σ²), N(2m, σ²)) ≈ 4m/(σ√2π) for small m: κ → 1.
  EXPECT_NEAR(fit.kappa, 1.0, 0.05);
  const auto same = contraction_rate_fit(evolve, mu1, mu1, [](double) { return 1.0; }, {1.0, 2.0, 3.0});
  EXPECT_TRUE(same.skipped);
}

TEST(Contraction, PsiDistanceReducesToTvForConstantPsi) {
  const Mesh mesh{-5.0, 5.0, 100};
  const auto a = MeshMeasure::gaussian(mesh, 0.0, 1.0), b = MeshMeasure::gaussian(mesh, 1.0, 1.0);
  EXPECT_NEAR(psi_distance(a, b, [](double) { return 1.0; }), 2 * tv_distance(a, b), 1e-14);
}
