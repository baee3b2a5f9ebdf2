#include "apmarkov/absorbed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apmarkov/rng.hpp"

namespace apmarkov {

BoundaryPair default_boundary_pair() {
  BoundaryPair pair;
  pair.gamma = 1.0;
  pair.n0 = 1;
  pair.g = TimeFunction::parse("1 + 0.25*sin(2*pi*t)", Declarations{0.75, 1.25, 1.0});
  pair.h = TimeFunction::parse("(1 + 0.25*sin(2*pi*t)) / (1 + 0.3*exp(-0.7*t))",
                               Declarations{0.75 / 1.3, 1.25, std::nullopt});
  return pair;
}

BoundaryValidation validate(const BoundaryPair& pair, double horizon, std::size_t n_points) {
  BoundaryValidation v;
  if (!(pair.gamma > 0.0)) {
    v.ok = false;
    v.problems.push_back("gamma must be positive");
    return v;
  }
  const std::size_t n = std::max<std::size_t>(n_points, 2);
  const double step = horizon / static_cast<double>(n - 1);
  std::vector<double> hv(n);
  v.h_min = std::numeric_limits<double>::infinity();
  v.h_max = -std::numeric_limits<double>::infinity();
  bool below_g = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = step * static_cast<double>(i);
    hv[i] = pair.h(t);
    v.h_min = std::min(v.h_min, hv[i]);
    v.h_max = std::max(v.h_max, hv[i]);
    if (hv[i] > pair.g(t) * (1.0 + 1e-12)) below_g = false;
  }
  if (!below_g) {
    v.ok = false;
    v.problems.push_back("h exceeds g somewhere on the check grid");
  }
  if (!(pair.h.declarations().lower > 0.0)) {
    v.ok = false;
    v.problems.push_back("h must declare a positive lower bound");
  }
  if (!(v.h_min > 0.0)) {
    v.ok = false;
    v.problems.push_back("h is not positive on the check grid");
  }
  const auto& gd = pair.g.declarations();
  if (!gd.period || std::fabs(*gd.period - pair.gamma) > 1e-12 * pair.gamma) {
    v.ok = false;
    v.problems.push_back("g must declare period equal to gamma");
  }
  // Running infimum reached within n0 periods, checked for s in the first
  // half of the grid so that [s, horizon] stays long.
  const double reach = static_cast<double>(pair.n0) * pair.gamma;
  for (std::size_t i = 0; i < n / 2; i += std::max<std::size_t>(1, n / 400)) {
    const auto it = std::min_element(hv.begin() + static_cast<std::ptrdiff_t>(i), hv.end());
    const double argmin_t = step * static_cast<double>(it - hv.begin());
    if (argmin_t > step * static_cast<double>(i) + reach + step) {
      v.ok = false;
      std::ostringstream os;
      os << "running infimum of h after s=" << step * static_cast<double>(i) << " is reached at t=" << argmin_t
         << ", beyond n0*gamma";
      v.problems.push_back(os.str());
      break;
    }
  }
  return v;
}

BoundarySchedule::BoundarySchedule(const TimeFunction& boundary, const TimeGrid& grid_) : grid(grid_) {
  h.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) h[k] = boundary(grid.time(k));
}

double BoundarySchedule::max() const { return *std::max_element(h.begin(), h.end()); }

namespace {

struct WalkResult {
  double x = 0.0;
  std::size_t exit_step = 0;  // step index k of the exit interval [t_k, t_{k+1}]
  bool survived = true;
  bool bridge_exit = false;
};

// Brownian walk in (−h, h) along a schedule; one normal and one uniform per
// step, so equal streams give equal increments on any boundary.
template <typename Visit>
WalkResult walk(const BoundarySchedule& sch, double x0, Stream& rng, bool bridge, Visit&& visit) {
  const double dt = sch.grid.dt;
  const double sd = std::sqrt(dt);
  WalkResult res;
  double x = x0;
  for (std::size_t k = 0; k < sch.grid.n_steps; ++k) {
    const double x1 = x + sd * rng.normal();
    const double u = rng.uniform();
    if (killed_in_step(x, x1, sch.h[k], sch.h[k + 1], dt, u, bridge)) {
      res.survived = false;
      res.exit_step = k;
      res.bridge_exit = !(x1 >= sch.h[k + 1] || x1 <= -sch.h[k + 1]);
      res.x = x1;
      return res;
    }
    x = x1;
    visit(k + 1, x);
  }
  res.x = x;
  return res;
}

void check_start(const BoundarySchedule& sch, double x0) {
  if (!(std::fabs(x0) < sch.h[0])) {
    std::ostringstream os;
    os << "start state " << x0 << " is outside (-h, h) with h=" << sch.h[0];
    throw std::invalid_argument(os.str());
  }
}

TimeGrid span_grid(double s, double duration, double dt) {
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return TimeGrid::covering(s, s + duration, dt);
}

ProbabilityEstimate bernoulli(std::size_t hits, std::size_t n) {
  ProbabilityEstimate e;
  e.n = n;
  e.p = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
  e.stderr_ = n ? std::sqrt(e.p * (1.0 - e.p) / static_cast<double>(n)) : 0.0;
  return e;
}

}  // namespace

AbsorbedPath simulate_absorbed(const TimeFunction& h, double x0, double T, std::uint64_t seed,
                               const AbsorptionOptions& opts, std::uint64_t stream) {
  const BoundarySchedule sch(h, span_grid(0.0, T, opts.dt));
  check_start(sch, x0);
  AbsorbedPath path;
  path.grid = sch.grid;
  path.states.reserve(sch.grid.size());
  path.states.push_back(x0);
  Stream rng(seed, stream);
  const auto res = walk(sch, x0, rng, opts.bridge, [&](std::size_t, double x) { path.states.push_back(x); });
  if (!res.survived) {
    const std::size_t k = res.exit_step;
    const double t0 = sch.grid.time(k);
    const double xa = path.states.back();
    path.states.push_back(res.x);
    if (res.bridge_exit) {
      path.tau = t0 + 0.5 * sch.grid.dt;
    } else {
      // Crossing of the linearized boundary inside the step.
      const double h0 = sch.h[k], h1 = sch.h[k + 1];
      double frac = 1.0;
      const double up_den = (h0 - xa) - (h1 - res.x);
      if (res.x >= h1 && up_den > 0.0) frac = std::min(frac, (h0 - xa) / up_den);
      const double lo_den = (h0 + xa) - (h1 + res.x);
      if (res.x <= -h1 && lo_den > 0.0) frac = std::min(frac, (h0 + xa) / lo_den);
      path.tau = t0 + std::clamp(frac, 0.0, 1.0) * sch.grid.dt;
    }
  }
  return path;
}

std::vector<std::uint8_t> survival_indicators(const TimeFunction& h, double x0, double s, double duration,
                                              std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts) {
  const BoundarySchedule sch(h, span_grid(s, duration, opts.dt));
  check_start(sch, x0);
  std::vector<std::uint8_t> out(n_paths, 0);
  for (std::size_t r = 0; r < n_paths; ++r) {
    Stream rng(seed, r);
    out[r] = walk(sch, x0, rng, opts.bridge, [](std::size_t, double) {}).survived ? 1 : 0;
  }
  return out;
}

ProbabilityEstimate survival_probability(const TimeFunction& h, double x0, double s, double duration,
                                         std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts) {
  const auto ind = survival_indicators(h, x0, s, duration, n_paths, seed, opts);
  std::size_t hits = 0;
  for (auto b : ind) hits += b;
  return bernoulli(hits, n_paths);
}

std::vector<double> conditioned_samples(const TimeFunction& h, double x0, double s, double duration,
                                        std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts) {
  const BoundarySchedule sch(h, span_grid(s, duration, opts.dt));
  check_start(sch, x0);
  std::vector<double> out;
  out.reserve(n_paths);
  for (std::size_t r = 0; r < n_paths; ++r) {
    Stream rng(seed, r);
    const auto res = walk(sch, x0, rng, opts.bridge, [](std::size_t, double) {});
    if (res.survived) out.push_back(res.x);
  }
  return out;
}

double girsanov_integrand_unsimplified(const TimeFunction& h, double u) {
  const auto dh = h.derivative();
  const auto product = h * dh;
  const double d = dh(u);
  return d * d - product.derivative()(u);
}

double girsanov_integrand(const TimeFunction& h, double u) { return -h(u) * h.derivative(u, 2); }

double girsanov_weight(const ClockPath& path, const TimeFunction& h, double s, double t) {
  const std::size_t n = path.times.size();
  if (n < 2 || path.clock.size() != n || path.w.size() != n) {
    throw ClockMismatch("girsanov_weight: times, clock and path must have equal length >= 2");
  }
  const double tol = 1e-9 * std::max(1.0, std::fabs(t));
  if (std::fabs(path.times.front() - s) > tol || std::fabs(path.times.back() - t) > tol) {
    throw ClockMismatch("girsanov_weight: path times do not span [s, t]");
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (!(path.times[k] > path.times[k - 1]) || path.clock[k] < path.clock[k - 1]) {
      throw ClockMismatch("girsanov_weight: times must increase and the clock must not decrease");
    }
  }
  const double expected = integrate([&h](double u) { const double v = h(u); return 1.0 / (v * v); }, s, t, 1e-12);
  const double got = path.clock.back() - path.clock.front();
  if (std::fabs(got - expected) > 1e-6 * std::max(1.0, expected)) {
    std::ostringstream os;
    os << "girsanov_weight: clock increment " << got << " does not match I^h(t)-I^h(s)=" << expected;
    throw ClockMismatch(os.str());
  }
  const auto dh = h.derivative();
  const auto d2h = dh.derivative();
  const auto edge = [&](double u, double w) { return dh(u) * h(u) * w * w; };
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = path.w[k] * path.w[k] * (-h(path.times[k]) * d2h(path.times[k]));
    const double b = path.w[k + 1] * path.w[k + 1] * (-h(path.times[k + 1]) * d2h(path.times[k + 1]));
    integral += 0.5 * (path.times[k + 1] - path.times[k]) * (a + b);
  }
  const double bracket = edge(t, path.w.back()) - edge(s, path.w.front()) + integral;
  return std::sqrt(h(t) / h(s)) * std::exp(-0.5 * bracket);
}

ProbabilityEstimate girsanov_survival(const TimeFunction& h, double x0, double s, double duration,
                                      std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts) {
  const auto grid = span_grid(s, duration, opts.dt);
  const std::size_t n = grid.size();
  const auto dh = h.derivative();
  const auto d2h = dh.derivative();
  std::vector<double> hv(n), edge_coef(n), integrand(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = grid.time(k);
    hv[k] = h(u);
    edge_coef[k] = dh(u) * hv[k];
    integrand[k] = -hv[k] * d2h(u);
  }
  if (!(std::fabs(x0) < hv[0])) throw std::invalid_argument("girsanov_survival: start state outside (-h(s), h(s))");
  const auto clock = cumulative_integral([&h](double u) { const double v = h(u); return 1.0 / (v * v); }, s, grid);
  std::vector<double> dclock(grid.n_steps);
  for (std::size_t k = 0; k < grid.n_steps; ++k) dclock[k] = clock[k + 1] - clock[k];

  const double prefactor = std::sqrt(hv[n - 1] / hv[0]);
  std::vector<double> values(n_paths, 0.0);
  for (std::size_t r = 0; r < n_paths; ++r) {
    Stream rng(seed, r);
    double w = x0 / hv[0];
    const double w_start = w;
    double integral = 0.0;
    double prev = w * w * integrand[0];
    bool alive = true;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
      const double w1 = w + std::sqrt(dclock[k]) * rng.normal();
      const double u = rng.uniform();
      if (killed_in_step(w, w1, 1.0, 1.0, dclock[k], u, opts.bridge)) {
        alive = false;
        break;
      }
      w = w1;
      const double cur = w * w * integrand[k + 1];
      integral += 0.5 * grid.dt * (prev + cur);
      prev = cur;
    }
    if (!alive) continue;
    const double bracket = edge_coef[n - 1] * w * w - edge_coef[0] * w_start * w_start + integral;
    values[r] = prefactor * std::exp(-0.5 * bracket);
  }
  const auto sum = summarize(values);
  return {sum.mean, sum.std_error(), n_paths};
}

std::vector<BoundaryConvergenceRow> boundary_convergence_report(const BoundaryPair& pair, double s, double t,
                                                                double x, const std::vector<std::size_t>& k_values,
                                                                std::size_t n_paths, std::uint64_t seed,
                                                                const AbsorptionOptions& opts) {
  if (!(s <= t)) throw std::invalid_argument("boundary_convergence_report: require s <= t");
  const auto g_ind = survival_indicators(pair.g, x, s, t - s, n_paths, seed, opts);
  std::size_t g_hits = 0;
  for (auto b : g_ind) g_hits += b;
  std::vector<BoundaryConvergenceRow> rows;
  for (const auto k : k_values) {
    const double shift = static_cast<double>(k) * pair.gamma;
    const auto h_ind = survival_indicators(pair.h, x, s + shift, t - s, n_paths, seed, opts);
    std::size_t h_hits = 0, sandwich = 0;
    std::vector<double> diff(n_paths);
    for (std::size_t r = 0; r < n_paths; ++r) {
      h_hits += h_ind[r];
      if (!h_ind[r] && g_ind[r]) ++sandwich;
      diff[r] = static_cast<double>(g_ind[r]) - static_cast<double>(h_ind[r]);
    }
    BoundaryConvergenceRow row;
    row.k = k;
    row.p_h = static_cast<double>(h_hits) / static_cast<double>(n_paths);
    row.p_g = static_cast<double>(g_hits) / static_cast<double>(n_paths);
    row.gap = std::fabs(row.p_h - row.p_g);
    row.stderr_ = summarize(diff).std_error();
    row.sandwich_prob = static_cast<double>(sandwich) / static_cast<double>(n_paths);
    rows.push_back(row);
  }
  return rows;
}

Minorant minorize(const std::vector<MeshMeasure>& laws) {
  if (laws.empty()) throw std::invalid_argument("minorize: no laws");
  Minorant m;
  m.nu = laws.front();
  for (std::size_t i = 1; i < laws.size(); ++i) {
    if (!(laws[i].mesh == m.nu.mesh)) throw MeshMismatch("minorize: laws live on different meshes");
    for (std::size_t j = 0; j < m.nu.weights.size(); ++j) m.nu.weights[j] = std::min(m.nu.weights[j], laws[i].weights[j]);
  }
  m.c = m.nu.total();
  if (m.c > 0.0) {
    m.nu.normalize();
  } else {
    std::fill(m.nu.weights.begin(), m.nu.weights.end(), 0.0);
  }
  return m;
}

ConditionalMinorization conditional_minorization_estimate(const TimeFunction& h, double s,
                                                          const std::vector<double>& t_values,
                                                          const std::vector<double>& probes, std::size_t n_paths,
                                                          std::size_t n_cells, std::uint64_t seed,
                                                          const AbsorptionOptions& opts) {
  if (t_values.empty() || probes.empty()) throw std::invalid_argument("conditional_minorization_estimate: empty window or probes");
  const double t_max = *std::max_element(t_values.begin(), t_values.end());
  const BoundarySchedule sch(h, span_grid(s, t_max, opts.dt));
  for (const double x : probes) check_start(sch, x);
  std::vector<std::size_t> snap_steps;
  for (const double t : t_values) {
    if (!(t > 0.0)) throw std::invalid_argument("conditional_minorization_estimate: window offsets must be positive");
    snap_steps.push_back(static_cast<std::size_t>(std::llround(t / sch.grid.dt)));
  }
  const Mesh mesh{-sch.max(), sch.max(), n_cells};

  const std::size_t nt = t_values.size();
  const std::size_t np = probes.size();
  std::vector<std::vector<std::vector<double>>> samples(nt, std::vector<std::vector<double>>(np));
  for (std::size_t p = 0; p < np; ++p) {
    const std::uint64_t probe_seed = splitmix64(seed + p);
    for (std::size_t r = 0; r < n_paths; ++r) {
      Stream rng(probe_seed, r);
      walk(sch, probes[p], rng, opts.bridge, [&](std::size_t step, double x) {
        for (std::size_t j = 0; j < nt; ++j) {
          if (snap_steps[j] == step) samples[j][p].push_back(x);
        }
      });
    }
  }

  ConditionalMinorization out;
  out.c1 = std::numeric_limits<double>::infinity();
  out.c1_lower = std::numeric_limits<double>::infinity();
  out.laws.resize(nt);
  out.survivors.resize(nt);
  std::size_t best = 0;
  for (std::size_t j = 0; j < nt; ++j) {
    double lower = 0.0;
    std::vector<MeshMeasure> laws;
    for (std::size_t p = 0; p < np; ++p) {
      laws.push_back(histogram(mesh, samples[j][p]));
      out.survivors[j].push_back(samples[j][p].size());
    }
    for (std::size_t c = 0; c < n_cells; ++c) {
      double cell_lower = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < np; ++p) {
        const double q = laws[p].weights[c];
        const double n = static_cast<double>(std::max<std::size_t>(1, out.survivors[j][p]));
        cell_lower = std::min(cell_lower, q - 1.96 * std::sqrt(q * (1.0 - q) / n));
      }
      lower += std::max(0.0, cell_lower);
    }
    const auto m = minorize(laws);
    if (m.c < out.c1) {
      out.c1 = m.c;
      out.nu_hat = m.nu;
      best = j;
    }
    out.c1_lower = std::min(out.c1_lower, lower);
    out.laws[j] = std::move(laws);
  }
  std::size_t empty = 0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    for (std::size_t p = 0; p < np; ++p) {
      if (out.laws[best][p].weights[c] == 0.0) {
        ++empty;
        break;
      }
    }
  }
  if (2 * empty > n_cells) {
    std::ostringstream os;
    os << empty << " of " << n_cells << " cells are empty for some probe; coarsen the mesh or raise n_paths";
    out.suggestion = os.str();
  }
  return out;
}

}  // namespace apmarkov
