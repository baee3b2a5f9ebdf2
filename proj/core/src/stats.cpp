#include "apmarkov/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "apmarkov/quadrature.hpp"

namespace apmarkov {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double SampleSummary::std_error() const {
  return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  // Welford
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  s.mean = mean;
  s.variance = s.n > 1 ? m2 / static_cast<double>(s.n - 1) : 0.0;
  return s;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double q = 0.0;
  if (lambda < 1e-3) {
    q = 1.0;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::fabs(term) < 1e-12) break;
      sign = -sign;
    }
    q = std::clamp(2.0 * q, 0.0, 1.0);
  }
  return {d, q};
}

std::size_t Mesh::cell_of(double x) const {
  const double r = (x - lo) / width();
  if (!(r > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(r);
  return std::min(i, n_cells - 1);
}

MeshMeasure MeshMeasure::zeros(const Mesh& mesh) { return {mesh, std::vector<double>(mesh.n_cells, 0.0)}; }

MeshMeasure MeshMeasure::uniform(const Mesh& mesh) {
  return {mesh, std::vector<double>(mesh.n_cells, 1.0 / static_cast<double>(mesh.n_cells))};
}

MeshMeasure MeshMeasure::point_mass(const Mesh& mesh, double x) {
  auto m = zeros(mesh);
  m.weights[mesh.cell_of(x)] = 1.0;
  return m;
}

MeshMeasure MeshMeasure::gaussian(const Mesh& mesh, double mean, double sd) {
  if (sd <= 0.0) return point_mass(mesh, mean);
  auto m = zeros(mesh);
  double prev = 0.0;  // folded lower tail
  for (std::size_t i = 0; i < mesh.n_cells; ++i) {
    const double upper = (i + 1 == mesh.n_cells) ? 1.0 : normal_cdf((mesh.edge(i + 1) - mean) / sd);
    m.weights[i] = upper - prev;
    prev = upper;
  }
  return m;
}

MeshMeasure MeshMeasure::from_density(const Mesh& mesh, const std::function<double(double)>& density) {
  auto m = zeros(mesh);
  for (std::size_t i = 0; i < mesh.n_cells; ++i) m.weights[i] = integrate(density, mesh.edge(i), mesh.edge(i + 1), 1e-12);
  m.normalize();
  return m;
}

double MeshMeasure::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void MeshMeasure::normalize() {
  const double s = total();
  if (s > 0.0) {
    for (double& w : weights) w /= s;
  }
}

double MeshMeasure::expectation(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * f(mesh.center(i));
  return s;
}

double MeshMeasure::mean() const {
  return expectation([](double x) { return x; });
}

double MeshMeasure::variance() const {
  const double m = mean();
  return expectation([m](double x) { return (x - m) * (x - m); });
}

double tv_distance(const MeshMeasure& mu, const MeshMeasure& nu) {
  if (!(mu.mesh == nu.mesh) || mu.weights.size() != nu.weights.size()) {
    throw MeshMismatch("tv_distance: measures live on different meshes");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < mu.weights.size(); ++i) s += std::fabs(mu.weights[i] - nu.weights[i]);
  return 0.5 * s;
}

MeshMeasure histogram(const Mesh& mesh, std::span<const double> samples) {
  auto m = MeshMeasure::zeros(mesh);
  for (double x : samples) m.weights[mesh.cell_of(x)] += 1.0;
  m.normalize();
  return m;
}

}  // namespace apmarkov
