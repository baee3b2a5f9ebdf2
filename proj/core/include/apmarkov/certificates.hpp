#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "apmarkov/ou.hpp"
#include "apmarkov/stats.hpp"

namespace apmarkov {

/// Transition evaluator for Gaussian kernels: (s, t) ↦ (m, σ), the law from x
/// being Normal(m·x, σ²).
using GaussianKernel = std::function<GaussianTransition(double s, double t)>;

GaussianKernel ou_kernel(const TimeFunction& drift, const TransitionOptions& opts = {});

/// Lyapunov function ψ ≥ 1 with its Gaussian expectation E ψ(mean + sd·Z).
struct LyapunovFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double mean, double sd)> gaussian_expectation;

  /// ψ(x) = 1 + x², E ψ = 1 + mean² + sd² in closed form.
  static LyapunovFunction quadratic();
  /// ψ ≡ 1.
  static LyapunovFunction constant();
  /// Arbitrary ψ; the Gaussian expectation uses 48-node Gauss–Hermite.
  static LyapunovFunction from_function(std::string name, std::function<double(double)> psi);
};

/// Points x_i = lo + i (hi − lo)/(n − 1).
struct PointMesh {
  double lo = -8.0;
  double hi = 8.0;
  std::size_t n_points = 2001;

  double point(std::size_t i) const {
    return n_points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }
};

/// Witness for P_{s,s+t1} ψ ≤ θ ψ + C 1_K on a test mesh.
struct DriftCertificate {
  double s = 0.0;
  double t1 = 0.0;
  double theta = 0.0;
  double C = 0.0;
  double k_edge = 0.0;
  double max_residual = 0.0;
  double argmax_x = 0.0;
  bool valid = false;
};

DriftCertificate check_drift(const GaussianKernel& kernel, const LyapunovFunction& psi, double s, double t1,
                             double theta, double C, double k_edge, const PointMesh& mesh = {});

/// Smallest symmetric K = [−k, k] outside which 1 + m²x² + σ² ≤ θ(1 + x²)
/// for ψ = 1 + x²; requires θ > m².
double suggest_drift_set(const GaussianTransition& tr, double theta);

/// sup over mesh and t_values of P_{s,s+t} ψ / ψ.
double check_growth(const GaussianKernel& kernel, const LyapunovFunction& psi, double s,
                    const std::vector<double>& t_values, const PointMesh& mesh = {});

/// C (1 + C/(1 − θ)).
double maj_bound(double theta, double C);

/// Witness for μ ≥ c ν over the Gaussian class {N(m, σ²): |m| ≤ a, σ ∈ [b−, b+]}.
struct MinorizationCertificate {
  double a = 0.0;
  double b_minus = 1.0;
  double b_plus = 1.0;
  double c = 0.0;
  double nu_mass = 0.0;  // ∫ f_ν
  /// Normalized density of ν.
  std::function<double(double)> nu_density;
  std::size_t n0 = 1;
  double t1 = 0.0;
  std::size_t samples_checked = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // min over samples and mesh of (density − c ν)
};

struct MinorizationCheckOptions {
  std::size_t n_samples = 1000;
  std::size_t mesh_points = 2001;
  std::uint64_t seed = 2024;
};

/// f_ν(x) = min(e^{−(x−a)²/2b−²}, e^{−(x+a)²/2b−²}), c = ∫f_ν / (√(2π) b+);
/// domination is then verified on sampled class members.
MinorizationCertificate gaussian_class_minorization(double a, double b_minus, double b_plus,
                                                    const MinorizationCheckOptions& opts = {});

struct DoeblinReport {
  bool valid = false;
  bool degenerate = false;  // c == 0
  double worst_margin = 0.0;
  double worst_s = 0.0;
  double worst_x = 0.0;
};

/// Checks δ_x P_{s, s+n0·t1} ≥ c ν cell-wise on `mesh` for every probe x and s.
DoeblinReport doeblin_from_minorization(const MinorizationCertificate& cert, const std::vector<double>& s_values,
                                        const std::vector<double>& probes, const GaussianKernel& kernel,
                                        const PointMesh& mesh = {});

/// Gaussian-class parameters for an OU kernel on K = [−k, k]: a = k·sup m, b− = inf σ,
/// b+ = sup σ over the sampled start times, then gaussian_class_minorization.
MinorizationCertificate ou_minorization_certificate(const GaussianKernel& kernel, double k_edge,
                                                    const std::vector<double>& s_values, double t1,
                                                    std::size_t n0 = 1,
                                                    const MinorizationCheckOptions& opts = {});

/// Σ ψ(center_i) |μ_i − ν_i|, the discrete ψ-distance.
double psi_distance(const MeshMeasure& mu, const MeshMeasure& nu, const std::function<double(double)>& psi);

struct ContractionFit {
  double c_prime = 0.0;
  double kappa = std::numeric_limits<double>::infinity();
  double r2 = 1.0;
  bool skipped = false;  // identical inputs: no decay to fit
  std::vector<double> horizons_used;
  std::vector<double> distances;
};

/// Evolution operator: law at `horizon` when started from `mu`.
using MeasureEvolution = std::function<MeshMeasure(const MeshMeasure& mu, double horizon)>;

/// Least squares of log ‖μ1 P_t − μ2 P_t‖_ψ against t: slope −κ, intercept
/// log(C'(μ1(ψ) + μ2(ψ))). Distances below 1e−300 are dropped; at least three
/// horizons must remain.
ContractionFit contraction_rate_fit(const MeasureEvolution& evolve, const MeshMeasure& mu1, const MeshMeasure& mu2,
                                    const std::function<double(double)>& psi, const std::vector<double>& horizons);

/// Pushes a mesh measure through Normal(m·x, σ²) transitions of `kernel`
/// started at s.
MeasureEvolution gaussian_mesh_evolution(const GaussianKernel& kernel, double s);

}  // namespace apmarkov
