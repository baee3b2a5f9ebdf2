#include "apmarkov/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace apmarkov {

TimeGrid::TimeGrid(double t0_, double dt_, std::size_t n_steps_) : t0(t0_), dt(dt_), n_steps(n_steps_) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
}

TimeGrid TimeGrid::covering(double t0, double t1, double dt_target) {
  if (!(t1 >= t0)) throw std::invalid_argument("TimeGrid::covering: t1 < t0");
  if (!(dt_target > 0.0)) throw std::invalid_argument("TimeGrid::covering: dt must be positive");
  if (t1 == t0) return TimeGrid(t0, dt_target, 0);
  const double ratio = (t1 - t0) / dt_target;
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  if (n == 0) n = 1;
  return TimeGrid(t0, (t1 - t0) / static_cast<double>(n), n);
}

std::size_t TimeGrid::index_of(double t) const {
  const double k = (t - t0) / dt;
  const double kr = std::round(k);
  if (kr < 0.0 || kr > static_cast<double>(n_steps) ||
      std::fabs(time(static_cast<std::size_t>(kr)) - t) > 1e-9 * std::max(1.0, std::fabs(t))) {
    std::ostringstream os;
    os << "time " << t << " is not a point of the grid [" << t0 << ", " << end() << "] step " << dt;
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(kr);
}

namespace {

struct Segment {
  double a, b, fa, fm, fb, whole, tol;
  int depth;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double checked(const ScalarFn& f, double x, std::size_t& evals) {
  ++evals;
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "integrand is not finite at x=" << x;
    throw QuadratureError(os.str(), x, x);
  }
  return v;
}

}  // namespace

QuadratureResult integrate_adaptive(const ScalarFn& f, double a, double b, const QuadratureOptions& opts) {
  if (!(a <= b)) {
    std::ostringstream os;
    os << "integrate: require a <= b, got [" << a << ", " << b << "]";
    throw std::invalid_argument(os.str());
  }
  QuadratureResult res;
  if (a == b) return res;

  const double m = 0.5 * (a + b);
  const double fa = checked(f, a, res.evaluations);
  const double fm = checked(f, m, res.evaluations);
  const double fb = checked(f, b, res.evaluations);

  std::vector<Segment> stack;
  stack.push_back({a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), opts.tol, 0});
  while (!stack.empty()) {
    Segment s = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (s.a + s.b);
    const double lm = 0.5 * (s.a + mid);
    const double rm = 0.5 * (mid + s.b);
    const double flm = checked(f, lm, res.evaluations);
    const double frm = checked(f, rm, res.evaluations);
    const double left = simpson(s.a, mid, s.fa, flm, s.fm);
    const double right = simpson(mid, s.b, s.fm, frm, s.fb);
    const double delta = left + right - s.whole;
    // Force a few levels of refinement so narrow features are not missed.
    if (s.depth >= 4 && std::fabs(delta) <= 15.0 * s.tol) {
      res.value += left + right + delta / 15.0;
      res.error_estimate += std::fabs(delta) / 15.0;
      continue;
    }
    if (s.depth >= opts.max_depth || res.evaluations > opts.max_evaluations) {
      std::ostringstream os;
      os << "adaptive Simpson did not converge on [" << s.a << ", " << s.b << "] (within ["
         << a << ", " << b << "], tol " << opts.tol << ")";
      throw QuadratureError(os.str(), s.a, s.b);
    }
    stack.push_back({mid, s.b, s.fm, frm, s.fb, right, 0.5 * s.tol, s.depth + 1});
    stack.push_back({s.a, mid, s.fa, flm, s.fm, left, 0.5 * s.tol, s.depth + 1});
  }
  return res;
}

double integrate(const ScalarFn& f, double a, double b, double tol) {
  QuadratureOptions opts;
  opts.tol = tol;
  return integrate_adaptive(f, a, b, opts).value;
}

double integrate(const TimeFunction& f, double a, double b, double tol) {
  return integrate([&f](double t) { return f(t); }, a, b, tol);
}

std::vector<double> cumulative_integral(const ScalarFn& f, double a, const TimeGrid& grid) {
  if (std::fabs(grid.t0 - a) > 1e-12 * std::max(1.0, std::fabs(a))) {
    throw std::invalid_argument("cumulative_integral: grid must start at a");
  }
  std::vector<double> out(grid.size(), 0.0);
  double f_left = f(grid.time(0));
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    const double f_mid = f(t + 0.5 * grid.dt);
    const double f_right = f(grid.time(k + 1));
    // RK4 with a state-independent right-hand side.
    out[k + 1] = out[k] + grid.dt / 6.0 * (f_left + 4.0 * f_mid + f_right);
    f_left = f_right;
  }
  return out;
}

std::vector<double> cumulative_integral(const TimeFunction& f, double a, const TimeGrid& grid) {
  return cumulative_integral([&f](double t) { return f(t); }, a, grid);
}

double GaussHermiteRule::expectation(const ScalarFn& f, double mean, double sd) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mean + sd * nodes[i]);
  return acc;
}

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be positive");
  // Physicists' rule by Newton iteration on orthonormal Hermite recurrences,
  // then rescaled to the standard normal weight.
  std::vector<double> x(n), w(n);
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const std::size_t m = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (dj + 1.0)) * p2 - std::sqrt(dj / (dj + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] * inv_sqrt_pi;
  }
  return rule;
}

}  // namespace apmarkov
