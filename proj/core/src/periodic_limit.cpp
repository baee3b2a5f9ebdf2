#include "apmarkov/periodic_limit.hpp"

#include <cmath>
#include <sstream>

namespace apmarkov {

SkeletonMap skeleton_map(const OUSpec& spec) {
  const auto tr = transition_params(spec.g, 0.0, spec.gamma);
  return {tr.m, tr.sigma};
}

InvariantGaussian invariant_gaussian(const SkeletonMap& skel) {
  if (!(skel.a < 1.0)) {
    std::ostringstream os;
    os << "skeleton not contracting (a = " << skel.a << ")";
    throw ConvergenceError(os.str());
  }
  return {0.0, skel.s0 * skel.s0 / (1.0 - skel.a * skel.a)};
}

InvariantGaussian invariant_gaussian(const OUSpec& spec) { return invariant_gaussian(skeleton_map(spec)); }

KernelMatrix::KernelMatrix(Mesh mesh, std::vector<double> rows) : mesh_(mesh), p_(std::move(rows)) {
  if (p_.size() != mesh_.n_cells * mesh_.n_cells) throw std::invalid_argument("KernelMatrix: size mismatch");
}

KernelMatrix KernelMatrix::gaussian(const Mesh& mesh, double m, double sigma) {
  const std::size_t n = mesh.n_cells;
  std::vector<double> rows(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = MeshMeasure::gaussian(mesh, m * mesh.center(i), sigma);
    std::copy(row.weights.begin(), row.weights.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return KernelMatrix(mesh, std::move(rows));
}

MeshMeasure KernelMatrix::apply(const MeshMeasure& mu) const {
  if (!(mu.mesh == mesh_)) throw MeshMismatch("KernelMatrix::apply: measure lives on another mesh");
  const std::size_t n = size();
  auto out = MeshMeasure::zeros(mesh_);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = mu.weights[i];
    if (w == 0.0) continue;
    const double* row = p_.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) out.weights[j] += w * row[j];
  }
  return out;
}

double KernelMatrix::row_sum_defect() const {
  const std::size_t n = size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += p_[i * n + j];
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  return worst;
}

PowerIterationResult power_iteration_invariant(const KernelMatrix& k, double tol, std::size_t max_iterations) {
  const double defect = k.row_sum_defect();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "power_iteration_invariant: kernel rows do not sum to 1 (defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }
  PowerIterationResult res;
  res.measure = MeshMeasure::uniform(k.mesh());
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    auto next = k.apply(res.measure);
    next.normalize();
    double diff = 0.0;
    for (std::size_t i = 0; i < next.weights.size(); ++i) diff += std::fabs(next.weights[i] - res.measure.weights[i]);
    res.measure = std::move(next);
    res.iterations = it;
    res.residual = diff;
    if (diff <= tol) return res;
  }
  std::ostringstream os;
  os << "power_iteration_invariant: no convergence after " << max_iterations << " iterations (residual "
     << res.residual << ")";
  throw ConvergenceError(os.str());
}

double limiting_value(const OUSpec& spec, const std::function<double(double)>& f, const LimitOptions& opts) {
  const auto inv = invariant_gaussian(spec);
  const auto rule = gauss_hermite(opts.hermite_nodes);
  const auto inner = [&](double s) {
    const auto tr = transition_params(spec.g, 0.0, s);
    const double var = tr.m * tr.m * inv.variance + tr.variance();
    return rule.expectation(f, 0.0, std::sqrt(var));
  };
  return integrate(inner, opts.s_origin, opts.s_origin + spec.gamma, opts.tol) / spec.gamma;
}

double limiting_value(const OUSpec& spec, const Observable& f, const LimitOptions& opts) {
  return limiting_value(spec, f.fn, opts);
}

}  // namespace apmarkov
