#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace apmarkov {

double normal_cdf(double x);
double normal_pdf(double x, double mean = 0.0, double sd = 1.0);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error() const;
};

SampleSummary summarize(std::span<const double> xs);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov–Smirnov statistic with the asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Uniform cells on [lo, hi].
struct Mesh {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n_cells = 1;

  double width() const { return (hi - lo) / static_cast<double>(n_cells); }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
  double edge(std::size_t i) const { return lo + static_cast<double>(i) * width(); }
  /// Cell containing x; values outside are folded into the edge cells.
  std::size_t cell_of(double x) const;

  bool operator==(const Mesh&) const = default;
};

class MeshMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability weights on the cells of a mesh.
struct MeshMeasure {
  Mesh mesh;
  std::vector<double> weights;

  static MeshMeasure zeros(const Mesh& mesh);
  static MeshMeasure uniform(const Mesh& mesh);
  static MeshMeasure point_mass(const Mesh& mesh, double x);
  /// Exact cell probabilities of N(mean, sd^2), tails folded into edge cells.
  static MeshMeasure gaussian(const Mesh& mesh, double mean, double sd);
  /// Cell masses ∫_cell density, by adaptive quadrature; then normalized.
  static MeshMeasure from_density(const Mesh& mesh, const std::function<double(double)>& density);

  double total() const;
  void normalize();
  double expectation(const std::function<double(double)>& f) const;
  double mean() const;
  double variance() const;
};

/// ½ Σ |μ_i − ν_i|.
double tv_distance(const MeshMeasure& mu, const MeshMeasure& nu);

/// Sample histogram on a mesh, normalized (empty input gives all zeros).
MeshMeasure histogram(const Mesh& mesh, std::span<const double> samples);

}  // namespace apmarkov
