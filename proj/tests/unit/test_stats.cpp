#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "apmarkov/rng.hpp"
#include "apmarkov/stats.hpp"
#include "gaussian.hpp"

using namespace apmarkov;

TEST(Stats, SummarizeAndLineFit) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto s = summarize(x);
  EXPECT_EQ(s.n, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
  EXPECT_NEAR(s.std_error(), std::sqrt(5.0 / 12.0), 1e-15);

  const std::vector<double> y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
}

TEST(Stats, NormalCdfAndPdf) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-16);
  EXPECT_NEAR(normal_pdf(3.0, 1.0, 2.0), normal_pdf(1.0) / 2.0, 1e-16);
}

TEST(Stats, KolmogorovSmirnov) {
  Stream s(11, 0);
  std::vector<double> a(3000), b(3000), c(3000);
  for (auto& v : a) v = s.normal();
  for (auto& v : b) v = s.normal();
  for (auto& v : c) v = s.normal() + 0.3;
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
}

TEST(MeshMeasure, GaussianCellsAndMoments) {
  const Mesh mesh{-8.0, 8.0, 800};
  const auto g = MeshMeasure::gaussian(mesh, 0.5, 1.5);
  EXPECT_NEAR(g.total(), 1.0, 1e-14);
  EXPECT_NEAR(g.mean(), 0.5, 1e-6);
  // Cell-centre variance carries the w²/12 binning term.
  EXPECT_NEAR(g.variance(), 2.25 + mesh.width() * mesh.width() / 12.0, 1e-5);
  EXPECT_EQ(mesh.cell_of(-100.0), 0u);
  EXPECT_EQ(mesh.cell_of(100.0), 799u);
}

TEST(MeshMeasure, TvDistanceMatchesClosedForm) {
  const Mesh mesh{-10.0, 10.0, 4000};
  const auto a = MeshMeasure::gaussian(mesh, 0.0, 1.0);
  const auto b = MeshMeasure::gaussian(mesh, 0.7, 1.0);
  EXPECT_NEAR(tv_distance(a, b), oracle::gaussian_tv_equal_sd(0.0, 0.7, 1.0), 1e-6);
  EXPECT_EQ(tv_distance(a, a), 0.0);
  const Mesh other{-10.0, 10.0, 400};
  EXPECT_THROW(tv_distance(a, MeshMeasure::uniform(other)), MeshMismatch);
}

TEST(MeshMeasure, FromDensityAndHistogram) {
  const Mesh mesh{-1.0, 1.0, 20};
  const auto m = MeshMeasure::from_density(mesh, [](double x) { return 1.0 - std::fabs(x); });
  EXPECT_NEAR(m.total(), 1.0, 1e-14);
  EXPECT_NEAR(m.weights[10], (0.1 - 0.005) / 1.0, 1e-12);
  const std::vector<double> xs{-0.95, -0.95, 0.05, 0.99};
  const auto h = histogram(mesh, xs);
  EXPECT_DOUBLE_EQ(h.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(h.weights[10], 0.25);
  EXPECT_DOUBLE_EQ(h.weights[19], 0.25);
  EXPECT_EQ(histogram(mesh, std::vector<double>{}).total(), 0.0);
}
