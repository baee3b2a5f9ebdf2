#include "apmarkov/ou.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "apmarkov/stats.hpp"

namespace apmarkov {

OUSpec default_ou_spec() {
  OUSpec spec;
  spec.gamma = 1.0;
  spec.g = TimeFunction::parse("1 + 0.5*sin(2*pi*t)", Declarations{0.5, 1.5, 1.0});
  spec.lambda = TimeFunction::parse("(1 + 0.5*sin(2*pi*t)) * (1 + 0.3*exp(-0.7*t))", Declarations{0.5, 1.95, std::nullopt});
  return spec;
}

GaussianTransition transition_params(const TimeFunction& drift, double s, double t, const TransitionOptions& opts) {
  if (!(s <= t)) {
    std::ostringstream os;
    os << "transition_params: require s <= t, got s=" << s << ", t=" << t;
    throw std::invalid_argument(os.str());
  }
  if (s == t) return {1.0, 0.0};
  const double len = t - s;
  const auto n = std::max<std::size_t>(opts.min_substeps,
                                       static_cast<std::size_t>(std::ceil(len / opts.max_substep - 1e-9)));
  const double h = len / static_cast<double>(n);
  double a = 0.0;  // ∫_s^u λ
  double w = 0.0;  // σ²(s,u)
  double lam_left = drift(s);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = s + static_cast<double>(i) * h;
    const double lam_mid = drift(u + 0.5 * h);
    const double lam_right = drift(i + 1 == n ? t : u + h);
    const double k1 = 1.0 - 2.0 * lam_left * w;
    const double k2 = 1.0 - 2.0 * lam_mid * (w + 0.5 * h * k1);
    const double k3 = 1.0 - 2.0 * lam_mid * (w + 0.5 * h * k2);
    const double k4 = 1.0 - 2.0 * lam_right * (w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a += h / 6.0 * (lam_left + 4.0 * lam_mid + lam_right);
    lam_left = lam_right;
  }
  if (!std::isfinite(a) || !std::isfinite(w)) {
    std::ostringstream os;
    os << "transition_params: non-finite integral of the drift on [" << s << ", " << t << "]";
    throw QuadratureError(os.str(), s, t);
  }
  return {std::exp(-a), std::sqrt(std::max(w, 0.0))};
}

GaussianTransition compose(const GaussianTransition& first, const GaussianTransition& second) {
  // X_t = m2 (m1 x + σ1 Z1) + σ2 Z2
  return {first.m * second.m, std::sqrt(second.m * second.m * first.variance() + second.variance())};
}

TransitionTable::TransitionTable(const TimeFunction& drift, const TimeGrid& grid, const TransitionOptions& opts)
    : grid_(grid) {
  steps_.reserve(grid.n_steps);
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    steps_.push_back(transition_params(drift, grid.time(k), grid.time(k + 1), opts));
  }
}

Stepper ou_stepper(const OUSpec& spec, bool use_auxiliary, const TimeGrid& grid, const StepperOptions& opts) {
  auto table = std::make_shared<const TransitionTable>(use_auxiliary ? spec.g : spec.lambda, grid, opts.transition);
  const bool zero_noise = opts.zero_noise;
  return [table, zero_noise](std::size_t step, double t_from, double, double x, Stream& rng) {
    if (step >= table->size() || std::fabs(table->grid().time(step) - t_from) > 1e-9 * (1.0 + std::fabs(t_from))) {
      throw SimulationError("ou_stepper: step does not belong to the tabulated grid");
    }
    const auto& tr = (*table)[step];
    const double z = rng.normal();
    return tr.m * x + (zero_noise ? 0.0 : tr.sigma * z);
  };
}

Stepper euler_stepper(const TimeFunction& drift) {
  return [drift](std::size_t, double t_from, double t_to, double x, Stream& rng) {
    const double dt = t_to - t_from;
    return x - drift(t_from) * x * dt + std::sqrt(dt) * rng.normal();
  };
}

double c_inf_estimate(const TimeFunction& drift, double gamma, double s_max, std::size_t n_samples) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = std::max<std::size_t>(n_samples, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = s_max * static_cast<double>(i) / static_cast<double>(n - 1);
    best = std::min(best, integrate(drift, s, s + gamma, 1e-10) / gamma);
  }
  return best;
}

OUValidation validate(const OUSpec& spec, double horizon) {
  OUValidation v;
  if (!(spec.gamma > 0.0)) {
    v.ok = false;
    v.problems.push_back("gamma must be positive");
    return v;
  }
  const auto& ld = spec.lambda.declarations();
  if (!std::isfinite(ld.lower) || !std::isfinite(ld.upper)) {
    v.ok = false;
    v.problems.push_back("lambda must declare finite bounds");
  } else {
    const auto rep = verify_declarations(spec.lambda, horizon);
    if (!rep.bounds_ok) {
      v.ok = false;
      v.problems.push_back("lambda leaves its declared bounds on [0, horizon]");
    }
  }
  const auto& gd = spec.g.declarations();
  if (!gd.period || std::fabs(*gd.period - spec.gamma) > 1e-12 * spec.gamma) {
    v.ok = false;
    v.problems.push_back("g must declare period equal to gamma");
  } else {
    const auto rep = verify_declarations(spec.g, 10.0 * spec.gamma);
    if (!rep.period_ok) {
      v.ok = false;
      v.problems.push_back("g is not periodic with its declared period");
    }
    if (!rep.bounds_ok) {
      v.ok = false;
      v.problems.push_back("g leaves its declared bounds");
    }
  }
  v.c_inf = c_inf_estimate(spec.lambda, spec.gamma, horizon);
  if (!(v.c_inf > 0.0)) {
    v.ok = false;
    v.problems.push_back("inf_s (1/gamma) int_s^{s+gamma} lambda is not positive");
  }
  return v;
}

double gaussian_tv(double m1, double s1, double m2, double s2) {
  if (s1 < 0.0 || s2 < 0.0) throw std::invalid_argument("gaussian_tv: negative standard deviation");
  if (s1 == 0.0 || s2 == 0.0) {
    if (s1 == 0.0 && s2 == 0.0) return m1 == m2 ? 0.0 : 1.0;
    return 1.0;
  }
  if (m1 == m2 && s1 == s2) return 0.0;

  std::vector<double> cuts;
  if (s1 == s2) {
    cuts.push_back(0.5 * (m1 + m2));
  } else {
    const double a = 0.5 / (s2 * s2) - 0.5 / (s1 * s1);
    const double b = m1 / (s1 * s1) - m2 / (s2 * s2);
    const double c = 0.5 * m2 * m2 / (s2 * s2) - 0.5 * m1 * m1 / (s1 * s1) + std::log(s2 / s1);
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Numerically stable roots.
      const double q = -0.5 * (b + std::copysign(sq, b));
      if (q != 0.0) {
        cuts.push_back(q / a);
        cuts.push_back(c / q);
      } else {
        cuts.push_back(-b / (2.0 * a));
      }
    }
  }
  const double lo = std::min(m1 - 14.0 * s1, m2 - 14.0 * s2);
  const double hi = std::max(m1 + 14.0 * s1, m2 + 14.0 * s2);
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const auto f = [=](double x) { return 0.5 * std::fabs(normal_pdf(x, m1, s1) - normal_pdf(x, m2, s2)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], lo);
    const double b = std::min(cuts[i + 1], hi);
    if (b > a) total += integrate(f, a, b, 1e-13);
  }
  return std::clamp(total, 0.0, 1.0);
}

std::vector<PeriodicityRow> asymptotic_periodicity_report(const OUSpec& spec, double s, std::size_t n,
                                                          const std::vector<std::size_t>& k_values,
                                                          const std::vector<double>& probes) {
  if (!(s >= 0.0 && s < spec.gamma)) throw std::invalid_argument("asymptotic_periodicity_report: s must lie in [0, gamma)");
  const auto q = transition_params(spec.g, s, s + static_cast<double>(n) * spec.gamma);
  std::vector<PeriodicityRow> rows;
  for (const auto k : k_values) {
    const double from = s + static_cast<double>(k) * spec.gamma;
    const auto p = transition_params(spec.lambda, from, from + static_cast<double>(n) * spec.gamma);
    for (const double x : probes) {
      rows.push_back({k, n, s, x, gaussian_tv(p.m * x, p.sigma, q.m * x, q.sigma)});
    }
  }
  return rows;
}

}  // namespace apmarkov
