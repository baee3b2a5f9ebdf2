#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "apmarkov/ensemble.hpp"
#include "apmarkov/ou.hpp"
#include "apmarkov/stats.hpp"

namespace apmarkov {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One period of the auxiliary semigroup: x ↦ a·x + s0·Z.
struct SkeletonMap {
  double a = 0.0;
  double s0 = 0.0;
};

SkeletonMap skeleton_map(const OUSpec& spec);

/// Centered Gaussian fixed point of the skeleton.
struct InvariantGaussian {
  double mean = 0.0;
  double variance = 0.0;
};

/// σ∞² = s0² / (1 − a²); throws ConvergenceError("skeleton not contracting")
/// when a >= 1.
InvariantGaussian invariant_gaussian(const SkeletonMap& skel);
InvariantGaussian invariant_gaussian(const OUSpec& spec);

/// Dense row-stochastic matrix on the cells of a mesh.
class KernelMatrix {
 public:
  KernelMatrix(Mesh mesh, std::vector<double> rows);

  /// Row i = cell probabilities of Normal(m·c_i, σ²), c_i the cell center,
  /// tails folded into the edge cells.
  static KernelMatrix gaussian(const Mesh& mesh, double m, double sigma);

  const Mesh& mesh() const { return mesh_; }
  std::size_t size() const { return mesh_.n_cells; }
  double operator()(std::size_t i, std::size_t j) const { return p_[i * size() + j]; }

  /// μK.
  MeshMeasure apply(const MeshMeasure& mu) const;

  /// Largest |row sum − 1|.
  double row_sum_defect() const;

 private:
  Mesh mesh_;
  std::vector<double> p_;
};

struct PowerIterationResult {
  MeshMeasure measure;
  std::size_t iterations = 0;
  double residual = 0.0;  // ‖μK − μ‖₁
};

/// μ ← μK from the uniform start until ‖μK − μ‖₁ <= tol.
/// Rows must sum to one within 1e-10.
PowerIterationResult power_iteration_invariant(const KernelMatrix& k, double tol = 1e-13,
                                               std::size_t max_iterations = 100000);

struct LimitOptions {
  double tol = 1e-10;
  std::size_t hermite_nodes = 64;
  /// Origin of the s-quadrature; the result is invariant under shifts by γ.
  double s_origin = 0.0;
};

/// (1/γ)∫_0^γ β_γ Q_{0,s} f ds with β_γ the invariant Gaussian; the inner law
/// is Normal(0, a_s² σ∞² + σ(0,s)²).
double limiting_value(const OUSpec& spec, const std::function<double(double)>& f, const LimitOptions& opts = {});
double limiting_value(const OUSpec& spec, const Observable& f, const LimitOptions& opts = {});

}  // namespace apmarkov
