#include "apmarkov/fleming_viot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "apmarkov/rng.hpp"

namespace apmarkov {

MeshMeasure OccupationMeasure::normalized() const {
  MeshMeasure m{mesh, mass};
  if (m.total() > 0.0) m.normalize();
  return m;
}

namespace {

// One Fleming–Viot run over a boundary schedule. on_resample(k, i, donor) is
// called after particle i has been moved onto donor; on_step(k, pos) after
// all resampling of step k (pos then holds the states at grid point k).
template <typename OnResample, typename OnStep>
std::size_t evolve(const BoundarySchedule& sch, std::vector<double>& pos, std::uint64_t seed, bool bridge,
                   OnResample&& on_resample, OnStep&& on_step) {
  const std::size_t n = pos.size();
  const double dt = sch.grid.dt;
  const double sd = std::sqrt(dt);
  std::vector<std::size_t> killed, alive;
  killed.reserve(n);
  alive.reserve(n);
  std::size_t absorptions = 0;
  for (std::size_t k = 0; k < sch.grid.n_steps; ++k) {
    Stream rng(seed, k);
    killed.clear();
    alive.clear();
    const double h0 = sch.h[k], h1 = sch.h[k + 1];
    for (std::size_t i = 0; i < n; ++i) {
      const double x = pos[i];
      const double x1 = x + sd * rng.normal();
      const double u = rng.uniform();
      pos[i] = x1;
      if (killed_in_step(x, x1, h0, h1, dt, u, bridge)) {
        killed.push_back(i);
      } else {
        alive.push_back(i);
      }
    }
    if (alive.empty()) {
      std::ostringstream os;
      os << "fleming_viot: all " << n << " particles absorbed in the step ending at t=" << sch.grid.time(k + 1)
         << "; reduce dt";
      throw SimulationError(os.str());
    }
    for (std::size_t i : killed) {
      const std::size_t donor = alive[rng.below(alive.size())];
      pos[i] = pos[donor];
      on_resample(k, i, donor);
    }
    absorptions += killed.size();
    on_step(k + 1, pos);
  }
  return absorptions;
}

void check_particles(std::size_t n) {
  if (n < 2) throw std::invalid_argument("fleming_viot: need at least 2 particles");
}

}  // namespace

FlemingViotResult fleming_viot(const TimeFunction& h, const FlemingViotOptions& opts) {
  check_particles(opts.n_particles);
  if (!(opts.dt > 0.0)) throw std::invalid_argument("fleming_viot: dt must be positive");
  if (!(opts.t_end > opts.t_start)) throw std::invalid_argument("fleming_viot: t_end must exceed t_start");
  if (opts.n_bins == 0) throw std::invalid_argument("fleming_viot: n_bins must be positive");
  if (!(opts.burn_in >= 0.0) || opts.burn_in >= opts.t_end - opts.t_start) {
    throw std::invalid_argument("fleming_viot: burn_in must lie inside the run");
  }
  const BoundarySchedule sch(h, TimeGrid::covering(opts.t_start, opts.t_end, opts.dt));
  if (!(std::fabs(opts.x0) < sch.h[0])) throw std::invalid_argument("fleming_viot: x0 outside (-h, h)");
  const double half = opts.half_width > 0.0 ? opts.half_width : sch.max();
  const Mesh mesh{-half, half, opts.n_bins};
  const std::size_t n = opts.n_particles, nb = opts.n_bins;
  const double dt = sch.grid.dt;
  const double t_burn = opts.t_start + opts.burn_in;

  FlemingViotResult res;
  res.lineage = {mesh, std::vector<double>(nb, 0.0), 0.0};
  res.forward = {mesh, std::vector<double>(nb, 0.0), 0.0};
  res.lineage_rows.assign(n * nb, 0.0);
  auto& rows = res.lineage_rows;
  auto& log = res.final_state.resample_log;
  std::vector<double> pos(n, opts.x0);
  std::vector<double> fwd_counts(nb, 0.0);
  double occupied = 0.0;

  res.absorptions = evolve(
      sch, pos, opts.seed, opts.bridge,
      [&](std::size_t k, std::size_t i, std::size_t donor) {
        std::copy_n(rows.begin() + static_cast<std::ptrdiff_t>(donor * nb), nb,
                    rows.begin() + static_cast<std::ptrdiff_t>(i * nb));
        if (opts.record_log) log.push_back({sch.grid.time(k + 1), i, donor});
      },
      [&](std::size_t k, const std::vector<double>& p) {
        if (sch.grid.time(k) <= t_burn + 1e-12 * std::max(1.0, t_burn)) return;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t c = mesh.cell_of(p[i]);
          rows[i * nb + c] += dt;
          fwd_counts[c] += dt;
        }
        occupied += dt;
      });

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < nb; ++c) res.lineage.mass[c] += rows[i * nb + c];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < nb; ++c) {
    res.lineage.mass[c] *= inv_n;
    res.forward.mass[c] = fwd_counts[c] * inv_n;
  }
  res.lineage.total_time = occupied;
  res.forward.total_time = occupied;
  res.final_state.time = sch.grid.end();
  res.final_state.seed = opts.seed;
  res.final_state.positions = std::move(pos);
  return res;
}

QProcessApprox q_process_approx(const TimeFunction& h, double s, double x, double t,
                                const std::vector<double>& horizons, std::size_t n_particles, double dt,
                                std::uint64_t seed, std::size_t n_bins) {
  check_particles(n_particles);
  if (horizons.empty()) throw std::invalid_argument("q_process_approx: no horizons");
  if (!(s <= t)) throw std::invalid_argument("q_process_approx: need s <= t");
  for (std::size_t j = 0; j < horizons.size(); ++j) {
    if (!(horizons[j] >= t)) throw std::invalid_argument("q_process_approx: horizons must be >= t");
    if (j > 0 && !(horizons[j] > horizons[j - 1])) {
      throw std::invalid_argument("q_process_approx: horizons must increase");
    }
  }
  const double t_max = horizons.back();
  const auto grid = t_max > s ? TimeGrid::covering(s, t_max, dt) : TimeGrid(s, dt, 0);
  const BoundarySchedule sch(h, grid);
  if (!(std::fabs(x) < sch.h[0])) throw std::invalid_argument("q_process_approx: x outside (-h(s), h(s))");
  const Mesh mesh{-sch.max(), sch.max(), n_bins};

  // Nearest grid points of t and of each horizon.
  auto nearest = [&](double u) {
    if (grid.n_steps == 0) return std::size_t{0};
    const double k = std::round((u - s) / grid.dt);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(grid.n_steps)));
  };
  const std::size_t k_t = nearest(t);
  std::vector<std::size_t> k_h;
  for (double T : horizons) k_h.push_back(nearest(T));

  QProcessApprox out;
  out.horizons = horizons;
  std::vector<double> pos(n_particles, x);
  std::vector<double> anc_pos(n_particles, x);
  std::vector<std::size_t> anc_id(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) anc_id[i] = i;
  std::size_t next = 0;

  auto snapshot = [&](std::size_t k) {
    while (next < k_h.size() && k_h[next] == k) {
      out.laws.push_back(histogram(mesh, anc_pos));
      out.distinct_ancestors.push_back(std::unordered_set<std::size_t>(anc_id.begin(), anc_id.end()).size());
      ++next;
    }
  };
  snapshot(0);
  evolve(
      sch, pos, seed, true,
      [&](std::size_t k, std::size_t i, std::size_t donor) {
        // Before time t the lineage is refreshed at k_t anyway.
        if (k + 1 > k_t) {
          anc_pos[i] = anc_pos[donor];
          anc_id[i] = anc_id[donor];
        }
      },
      [&](std::size_t k, const std::vector<double>& p) {
        if (k == k_t) {
          anc_pos = p;
          for (std::size_t i = 0; i < p.size(); ++i) anc_id[i] = i;
        }
        snapshot(k);
      });

  for (std::size_t j = 0; j < out.distinct_ancestors.size(); ++j) {
    if (out.distinct_ancestors[j] < 100) {
      out.flagged = true;
      std::ostringstream os;
      os << "only " << out.distinct_ancestors[j] << " distinct ancestors at horizon " << horizons[j]
         << "; increase the number of particles";
      out.message = os.str();
      break;
    }
  }
  for (std::size_t j = 1; j < out.laws.size(); ++j) out.consecutive_tv.push_back(tv_distance(out.laws[j - 1], out.laws[j]));
  return out;
}

namespace {

struct PooledRuns {
  std::vector<MeshMeasure> per_seed;  // normalized lineage measure per run
};

PooledRuns run_pool(const TimeFunction& b, const QedComparisonOptions& o, double T, double half, std::uint64_t salt) {
  PooledRuns pool;
  for (auto seed : o.seeds) {
    FlemingViotOptions fo;
    fo.n_particles = o.n_particles;
    fo.dt = o.dt;
    fo.t_end = T;
    fo.seed = splitmix64(seed ^ salt);
    fo.n_bins = o.n_bins;
    fo.half_width = half;
    auto r = fleming_viot(b, fo);
    pool.per_seed.push_back(r.lineage.normalized());
  }
  return pool;
}

MeshMeasure average(const std::vector<MeshMeasure>& ms, const std::vector<std::size_t>& pick) {
  auto out = MeshMeasure::zeros(ms.front().mesh);
  for (std::size_t j : pick) {
    for (std::size_t c = 0; c < out.weights.size(); ++c) out.weights[c] += ms[j].weights[c];
  }
  out.normalize();
  return out;
}

double half_width_for(const BoundaryPair& pair, double T, double dt) {
  const auto grid = TimeGrid::covering(0.0, T, dt);
  return std::max(BoundarySchedule(pair.h, grid).max(), BoundarySchedule(pair.g, grid).max());
}

}  // namespace

QedComparison qed_comparison(const BoundaryPair& pair, const QedComparisonOptions& opts) {
  if (opts.seeds.empty()) throw std::invalid_argument("qed_comparison: no seeds");
  const double half = half_width_for(pair, opts.T, opts.dt);
  constexpr std::uint64_t kSaltH = 0x68ULL, kSaltG = 0x67ULL;
  const auto ph = run_pool(pair.h, opts, opts.T, half, kSaltH);
  const auto pg = run_pool(pair.g, opts, opts.T, half, kSaltG);
  std::vector<std::size_t> all(opts.seeds.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;

  QedComparison out;
  out.under_h = average(ph.per_seed, all);
  out.under_g = average(pg.per_seed, all);
  out.tv = tv_distance(out.under_h, out.under_g);

  // Particles of one run share ancestors, so only whole runs are resampled.
  const std::size_t m = opts.seeds.size();
  if (m > 1 && opts.bootstrap > 1) {
    Stream rng(opts.seeds.front(), 0xb007ULL);
    std::vector<double> tvs;
    tvs.reserve(opts.bootstrap);
    std::vector<std::size_t> pick_h(m), pick_g(m);
    for (std::size_t b = 0; b < opts.bootstrap; ++b) {
      for (std::size_t j = 0; j < m; ++j) pick_h[j] = rng.below(m);
      for (std::size_t j = 0; j < m; ++j) pick_g[j] = rng.below(m);
      tvs.push_back(tv_distance(average(ph.per_seed, pick_h), average(pg.per_seed, pick_g)));
    }
    out.bootstrap_se = std::sqrt(summarize(tvs).variance);
  } else {
    out.bootstrap_se = std::numeric_limits<double>::quiet_NaN();
  }

  if (opts.compare_half_horizon) {
    const auto hh = run_pool(pair.h, opts, 0.5 * opts.T, half, kSaltH);
    const auto hg = run_pool(pair.g, opts, 0.5 * opts.T, half, kSaltG);
    out.tv_half = tv_distance(average(hh.per_seed, all), average(hg.per_seed, all));
  }
  return out;
}

}  // namespace apmarkov
