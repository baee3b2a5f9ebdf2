#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apmarkov/absorbed.hpp"
#include "apmarkov/stats.hpp"
#include "apmarkov/time_function.hpp"

namespace apmarkov {

struct FlemingViotOptions {
  std::size_t n_particles = 2000;
  double dt = 1e-3;
  double t_start = 0.0;
  double t_end = 50.0;  // absolute time
  std::uint64_t seed = 1;
  std::size_t n_bins = 50;
  /// Occupation mesh half-width; 0 uses the largest h on the run's grid.
  double half_width = 0.0;
  /// Occupation is accumulated from t_start + burn_in on.
  double burn_in = 0.0;
  double x0 = 0.0;
  bool bridge = true;
  bool record_log = false;
};

struct ResampleRecord {
  double time = 0.0;
  std::size_t absorbed = 0;
  std::size_t donor = 0;
};

struct ParticleSystem {
  double time = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> positions;
  std::vector<ResampleRecord> resample_log;
};

/// Time-weighted occupation histogram on [−h_max, h_max].
struct OccupationMeasure {
  Mesh mesh;
  std::vector<double> mass;  // accumulated time per cell
  double total_time = 0.0;

  MeshMeasure normalized() const;
};

struct FlemingViotResult {
  ParticleSystem final_state;
  /// Occupation along ancestral paths, averaged over the final particles:
  /// estimates E[(1/t)∫ 1{X_u ∈ ·} du | τ > t], the quasi-ergodic law.
  OccupationMeasure lineage;
  /// Occupation of the running empirical measure: estimates
  /// (1/t)∫ P[X_u ∈ · | τ > u] du.
  OccupationMeasure forward;
  std::size_t absorptions = 0;
  /// Per-particle lineage histograms at t_end, n_particles × n_bins.
  std::vector<double> lineage_rows;
};

/// N Brownian particles in (−h, h) started at x0. At every step each particle
/// takes an Euler increment; absorbed particles are processed in index order
/// and jump to a survivor drawn uniformly from the particles not absorbed in
/// that step, inheriting its ancestral occupation. Step k draws from
/// Stream(seed, k). Throws SimulationError when a whole step is absorbed.
FlemingViotResult fleming_viot(const TimeFunction& h, const FlemingViotOptions& opts);

struct QProcessApprox {
  std::vector<double> horizons;
  /// Law of X_t given survival to each horizon.
  std::vector<MeshMeasure> laws;
  std::vector<std::size_t> distinct_ancestors;
  /// TV between consecutive horizons; size horizons.size() − 1.
  std::vector<double> consecutive_tv;
  bool flagged = false;  // fewer than 100 distinct ancestors at some horizon
  std::string message;
};

/// P_{s,x}[X_t ∈ · | τ_h > T] for each T in `horizons` (increasing, ≥ t),
/// read from the time-t ancestral positions of one Fleming–Viot run.
QProcessApprox q_process_approx(const TimeFunction& h, double s, double x, double t,
                                const std::vector<double>& horizons, std::size_t n_particles, double dt,
                                std::uint64_t seed, std::size_t n_bins = 25);

struct QedComparisonOptions {
  std::size_t n_particles = 2000;
  double T = 50.0;
  double dt = 1e-3;
  std::vector<std::uint64_t> seeds{1};
  std::size_t n_bins = 25;
  std::size_t bootstrap = 200;
  bool compare_half_horizon = false;
};

struct QedComparison {
  double tv = 0.0;
  double bootstrap_se = 0.0;  // NaN with one seed
  double tv_half = -1.0;  // at T/2 when requested
  MeshMeasure under_h;
  MeshMeasure under_g;
};

/// TV between lineage occupation measures under h and under g, both run from
/// x0 = 0 on a common mesh over [−max h, max h], pooled over seeds. The error
/// bar resamples whole runs and is NaN for a single seed. h and g use
/// disjoint seed streams.
QedComparison qed_comparison(const BoundaryPair& pair, const QedComparisonOptions& opts);

}  // namespace apmarkov
