#include "apmarkov/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "apmarkov/quadrature.hpp"
#include "apmarkov/rng.hpp"

namespace apmarkov {

namespace {

constexpr double kRelSlack = 1e-12;

bool dominated_violation(double density, double floor_density) {
  return density < floor_density * (1.0 - kRelSlack) - 1e-300;
}

}  // namespace

GaussianKernel ou_kernel(const TimeFunction& drift, const TransitionOptions& opts) {
  return [drift, opts](double s, double t) { return transition_params(drift, s, t, opts); };
}

LyapunovFunction LyapunovFunction::quadratic() {
  return {"1+x^2", [](double x) { return 1.0 + x * x; },
          [](double mean, double sd) { return 1.0 + mean * mean + sd * sd; }};
}

LyapunovFunction LyapunovFunction::constant() {
  return {"1", [](double) { return 1.0; }, [](double, double) { return 1.0; }};
}

LyapunovFunction LyapunovFunction::from_function(std::string name, std::function<double(double)> psi) {
  auto rule = std::make_shared<const GaussHermiteRule>(gauss_hermite(48));
  return {std::move(name), psi, [psi, rule](double mean, double sd) { return rule->expectation(psi, mean, sd); }};
}

DriftCertificate check_drift(const GaussianKernel& kernel, const LyapunovFunction& psi, double s, double t1,
                             double theta, double C, double k_edge, const PointMesh& mesh) {
  DriftCertificate cert{s, t1, theta, C, k_edge, -std::numeric_limits<double>::infinity(), 0.0, false};
  const auto tr = kernel(s, s + t1);
  for (std::size_t i = 0; i < mesh.n_points; ++i) {
    const double x = mesh.point(i);
    const double p_psi = psi.gaussian_expectation(tr.m * x, tr.sigma);
    const double indicator = std::fabs(x) <= k_edge ? 1.0 : 0.0;
    const double residual = p_psi - theta * psi.value(x) - C * indicator;
    if (residual > cert.max_residual) {
      cert.max_residual = residual;
      cert.argmax_x = x;
    }
  }
  cert.valid = cert.max_residual <= 0.0;
  return cert;
}

double suggest_drift_set(const GaussianTransition& tr, double theta) {
  const double m2 = tr.m * tr.m;
  if (!(theta > m2)) {
    std::ostringstream os;
    os << "suggest_drift_set: theta " << theta << " must exceed m^2 = " << m2;
    throw std::invalid_argument(os.str());
  }
  const double num = 1.0 + tr.variance() - theta;
  return num <= 0.0 ? 0.0 : std::sqrt(num / (theta - m2));
}

double check_growth(const GaussianKernel& kernel, const LyapunovFunction& psi, double s,
                    const std::vector<double>& t_values, const PointMesh& mesh) {
  double worst = 0.0;
  for (const double t : t_values) {
    const auto tr = kernel(s, s + t);
    for (std::size_t i = 0; i < mesh.n_points; ++i) {
      const double x = mesh.point(i);
      worst = std::max(worst, psi.gaussian_expectation(tr.m * x, tr.sigma) / psi.value(x));
    }
  }
  return worst;
}

double maj_bound(double theta, double C) { return C * (1.0 + C / (1.0 - theta)); }

MinorizationCertificate gaussian_class_minorization(double a, double b_minus, double b_plus,
                                                    const MinorizationCheckOptions& opts) {
  if (!(a >= 0.0) || !(b_minus > 0.0) || !(b_minus <= b_plus)) {
    std::ostringstream os;
    os << "gaussian_class_minorization: need a >= 0 and 0 < b_minus <= b_plus, got a=" << a
       << ", b_minus=" << b_minus << ", b_plus=" << b_plus;
    throw std::invalid_argument(os.str());
  }
  const double inv2b2 = 0.5 / (b_minus * b_minus);
  const auto f_nu = [a, inv2b2](double x) {
    return std::min(std::exp(-(x - a) * (x - a) * inv2b2), std::exp(-(x + a) * (x + a) * inv2b2));
  };
  // f_ν is symmetric with its kink at 0.
  const double half = integrate(f_nu, 0.0, a + 40.0 * b_minus, 1e-13);

  MinorizationCertificate cert;
  cert.a = a;
  cert.b_minus = b_minus;
  cert.b_plus = b_plus;
  cert.nu_mass = 2.0 * half;
  cert.c = cert.nu_mass / (std::sqrt(2.0 * std::numbers::pi) * b_plus);
  const double mass = cert.nu_mass;
  cert.nu_density = [f_nu, mass](double x) { return f_nu(x) / mass; };

  const double lo = -a - 8.0 * b_plus;
  const double hi = a + 8.0 * b_plus;
  const double c_over_norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * b_plus);
  Stream rng(opts.seed, 0);
  cert.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < opts.n_samples; ++k) {
    double m, sigma;
    if (k < 4) {
      // Class corners first.
      m = (k & 1) ? a : -a;
      sigma = (k & 2) ? b_plus : b_minus;
    } else {
      m = -a + 2.0 * a * rng.uniform();
      sigma = b_minus + (b_plus - b_minus) * rng.uniform();
    }
    for (std::size_t i = 0; i < opts.mesh_points; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(opts.mesh_points - 1);
      const double density = normal_pdf(x, m, sigma);
      const double floor_density = c_over_norm * f_nu(x);
      cert.worst_margin = std::min(cert.worst_margin, density - floor_density);
      if (dominated_violation(density, floor_density)) ++cert.violations;
    }
    ++cert.samples_checked;
  }
  return cert;
}

DoeblinReport doeblin_from_minorization(const MinorizationCertificate& cert, const std::vector<double>& s_values,
                                        const std::vector<double>& probes, const GaussianKernel& kernel,
                                        const PointMesh& mesh) {
  DoeblinReport rep;
  rep.degenerate = cert.c == 0.0;
  if (rep.degenerate) {
    rep.valid = true;
    return rep;
  }
  rep.valid = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double horizon = static_cast<double>(cert.n0) * cert.t1;
  for (const double s : s_values) {
    const auto tr = kernel(s, s + horizon);
    for (const double x : probes) {
      for (std::size_t i = 0; i < mesh.n_points; ++i) {
        const double y = mesh.point(i);
        const double density = tr.sigma > 0.0 ? normal_pdf(y, tr.m * x, tr.sigma) : 0.0;
        const double floor_density = cert.c * cert.nu_density(y);
        const double margin = density - floor_density;
        if (margin < rep.worst_margin) {
          rep.worst_margin = margin;
          rep.worst_s = s;
          rep.worst_x = x;
        }
        if (dominated_violation(density, floor_density)) rep.valid = false;
      }
    }
  }
  return rep;
}

MinorizationCertificate ou_minorization_certificate(const GaussianKernel& kernel, double k_edge,
                                                    const std::vector<double>& s_values, double t1, std::size_t n0,
                                                    const MinorizationCheckOptions& opts) {
  if (s_values.empty()) throw std::invalid_argument("ou_minorization_certificate: no start times");
  double sup_m = 0.0;
  double inf_sigma = std::numeric_limits<double>::infinity();
  double sup_sigma = 0.0;
  const double horizon = static_cast<double>(n0) * t1;
  for (const double s : s_values) {
    const auto tr = kernel(s, s + horizon);
    sup_m = std::max(sup_m, std::fabs(tr.m));
    inf_sigma = std::min(inf_sigma, tr.sigma);
    sup_sigma = std::max(sup_sigma, tr.sigma);
  }
  auto cert = gaussian_class_minorization(k_edge * sup_m, inf_sigma, sup_sigma, opts);
  cert.n0 = n0;
  cert.t1 = t1;
  return cert;
}

double psi_distance(const MeshMeasure& mu, const MeshMeasure& nu, const std::function<double(double)>& psi) {
  if (!(mu.mesh == nu.mesh) || mu.weights.size() != nu.weights.size()) {
    throw MeshMismatch("psi_distance: measures live on different meshes");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < mu.weights.size(); ++i) {
    s += psi(mu.mesh.center(i)) * std::fabs(mu.weights[i] - nu.weights[i]);
  }
  return s;
}

ContractionFit contraction_rate_fit(const MeasureEvolution& evolve, const MeshMeasure& mu1, const MeshMeasure& mu2,
                                    const std::function<double(double)>& psi, const std::vector<double>& horizons) {
  if (horizons.size() < 3) throw std::invalid_argument("contraction_rate_fit: need at least 3 horizons");
  ContractionFit fit;
  std::vector<double> xs, ys;
  bool any_positive = false;
  for (const double t : horizons) {
    const double d = psi_distance(evolve(mu1, t), evolve(mu2, t), psi);
    if (d > 0.0) any_positive = true;
    if (d > 1e-300) {
      xs.push_back(t);
      ys.push_back(std::log(d));
      fit.horizons_used.push_back(t);
      fit.distances.push_back(d);
    }
  }
  if (!any_positive) {
    fit.skipped = true;
    return fit;
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("contraction_rate_fit: fewer than 3 horizons left after dropping underflowed distances");
  }
  const auto line = fit_line(xs, ys);
  fit.kappa = -line.slope;
  fit.r2 = line.r2;
  const double psi_mass = mu1.expectation(psi) + mu2.expectation(psi);
  fit.c_prime = std::exp(line.intercept) / psi_mass;
  return fit;
}

MeasureEvolution gaussian_mesh_evolution(const GaussianKernel& kernel, double s) {
  return [kernel, s](const MeshMeasure& mu, double horizon) {
    const auto tr = kernel(s, s + horizon);
    auto out = MeshMeasure::zeros(mu.mesh);
    for (std::size_t i = 0; i < mu.weights.size(); ++i) {
      const double w = mu.weights[i];
      if (w == 0.0) continue;
      const auto row = MeshMeasure::gaussian(mu.mesh, tr.m * mu.mesh.center(i), tr.sigma);
      for (std::size_t j = 0; j < row.weights.size(); ++j) out.weights[j] += w * row.weights[j];
    }
    return out;
  };
}

}  // namespace apmarkov
