#include "apmarkov/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apmarkov/periodic_limit.hpp"

namespace apmarkov {

namespace {

std::vector<std::size_t> checkpoint_indices(const TimeGrid& grid, const std::vector<double>& t_values) {
  std::vector<std::size_t> idx;
  idx.reserve(t_values.size());
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0)) throw std::invalid_argument("ergodic: checkpoint times must be positive");
    if (i > 0 && !(t_values[i] > t_values[i - 1])) throw std::invalid_argument("ergodic: checkpoint times must increase");
    idx.push_back(grid.index_of(t_values[i]));
  }
  return idx;
}

// Ā at each checkpoint along one path, trapezoid rule.
void checkpoint_averages(std::span<const double> path, const Observable& f, double dt,
                         const std::vector<std::size_t>& idx, std::span<double> out) {
  double integral = 0.0;
  double prev = f(path[0]);
  std::size_t next = 0;
  for (std::size_t k = 1; k < path.size() && next < idx.size(); ++k) {
    const double v = f(path[k]);
    integral += 0.5 * dt * (prev + v);
    prev = v;
    while (next < idx.size() && idx[next] == k) {
      out[next] = integral / (static_cast<double>(k) * dt);
      ++next;
    }
  }
}

double resolve_limit(const OUSpec& spec, const Observable& f, double override_limit) {
  return std::isnan(override_limit) ? limiting_value(spec, f) : override_limit;
}

}  // namespace

ErgodicReport run_l2_experiment(const OUSpec& spec, const Observable& f, const InitialSampler& initial,
                                const std::vector<double>& t_values, std::size_t n_replicas,
                                const ErgodicOptions& opts) {
  if (t_values.empty()) throw std::invalid_argument("run_l2_experiment: no t values");
  if (n_replicas < 2) throw std::invalid_argument("run_l2_experiment: need at least 2 replicas");
  const auto grid = TimeGrid(0.0, opts.dt, static_cast<std::size_t>(std::llround(t_values.back() / opts.dt)));
  const auto idx = checkpoint_indices(grid, t_values);
  const std::size_t nt = t_values.size();

  ErgodicReport rep;
  rep.limit = resolve_limit(spec, f, opts.limit);
  rep.n_replicas = n_replicas;
  rep.dt = opts.dt;
  rep.averages.assign(nt * n_replicas, 0.0);

  const auto stepper = ou_stepper(spec, opts.use_auxiliary, grid);
  std::vector<double> scratch_rows(n_replicas * nt, 0.0);
  for_each_path(
      stepper, initial, grid, n_replicas, opts.seed,
      [&](std::size_t r, std::span<const double> path) {
        checkpoint_averages(path, f, grid.dt, idx, {scratch_rows.data() + r * nt, nt});
      },
      opts.threads);

  std::vector<double> col(n_replicas), sq(n_replicas);
  std::vector<double> log_t, log_var;
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t r = 0; r < n_replicas; ++r) {
      col[r] = scratch_rows[r * nt + j];
      const double d = col[r] - rep.limit;
      sq[r] = d * d;
      rep.averages[j * n_replicas + r] = col[r];
    }
    const auto s = summarize(col);
    const auto e = summarize(sq);
    rep.rows.push_back({t_values[j], s.mean, e.mean, s.variance, s.std_error(), e.std_error()});
    if (s.variance > 0.0) {
      log_t.push_back(std::log(t_values[j]));
      log_var.push_back(std::log(s.variance));
    }
  }
  if (log_t.size() >= 2) {
    rep.variance_slope = fit_line(log_t, log_var);
    rep.slope_available = true;
  } else {
    rep.variance_slope.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::vector<AsPoint> run_as_experiment(const OUSpec& spec, const Observable& f, const InitialSampler& initial,
                                       double t_max, const std::vector<double>& checkpoints,
                                       const ErgodicOptions& opts) {
  const auto grid = TimeGrid(0.0, opts.dt, static_cast<std::size_t>(std::llround(t_max / opts.dt)));
  std::vector<double> cps;
  for (double c : checkpoints) {
    if (c <= t_max + 1e-12) cps.push_back(c);
  }
  if (cps.empty()) throw std::invalid_argument("run_as_experiment: no checkpoint inside [0, t_max]");
  const auto idx = checkpoint_indices(grid, cps);
  const double limit = resolve_limit(spec, f, opts.limit);

  std::vector<double> avgs(cps.size(), 0.0);
  const auto stepper = ou_stepper(spec, opts.use_auxiliary, grid);
  for_each_path(stepper, initial, grid, 1, opts.seed,
                [&](std::size_t, std::span<const double> path) { checkpoint_averages(path, f, grid.dt, idx, avgs); });

  std::vector<AsPoint> out;
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) out.push_back({cps[i], avgs[i], std::fabs(avgs[i] - limit)});
  return out;
}

std::vector<double> default_checkpoints(double t_max) {
  std::vector<double> cps;
  for (double n = 1.0; n * n <= t_max + 1e-9; n += 1.0) cps.push_back(n * n);
  for (double d = 10.0; d <= t_max + 1e-9; d *= 10.0) cps.push_back(d);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

}  // namespace apmarkov
