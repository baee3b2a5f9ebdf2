#pragma once

#include <cstdint>
#include <vector>

#include "apmarkov/ensemble.hpp"
#include "apmarkov/ou.hpp"
#include "apmarkov/stats.hpp"

namespace apmarkov {

struct ErgodicRow {
  double t = 0.0;
  double mean_avg = 0.0;   // mean over replicas of Ā_t
  double l2_err = 0.0;     // mean over replicas of (Ā_t − L)²
  double var = 0.0;        // cross-replica variance of Ā_t
  double stderr_ = 0.0;    // standard error of mean_avg
  double l2_stderr = 0.0;  // standard error of l2_err
};

struct ErgodicReport {
  double limit = 0.0;
  std::size_t n_replicas = 0;
  double dt = 0.0;
  std::vector<ErgodicRow> rows;
  /// log Var(Ā_t) against log t; NaN when fewer than two positive variances.
  LinearFit variance_slope{};
  bool slope_available = false;
  /// Per replica, per t (row-major by t), kept for distributional checks.
  std::vector<double> averages;
};

struct ErgodicOptions {
  double dt = 1e-2;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Simulate the auxiliary semigroup Q (drift g) instead of P.
  bool use_auxiliary = false;
  /// Override the limit; NaN computes it from limiting_value.
  double limit = std::numeric_limits<double>::quiet_NaN();
};

/// For each t: E[(Ā_t − L)²] across replicas, with Ā_t the trapezoidal path
/// time average and L the period-averaged limit. t_values must be increasing
/// multiples of dt.
ErgodicReport run_l2_experiment(const OUSpec& spec, const Observable& f, const InitialSampler& initial,
                                const std::vector<double>& t_values, std::size_t n_replicas,
                                const ErgodicOptions& opts = {});

struct AsPoint {
  double t = 0.0;
  double average = 0.0;
  double deviation = 0.0;  // |Ā_t − L|
};

/// Single-path deviations at checkpoints (replica 0 of `seed`).
std::vector<AsPoint> run_as_experiment(const OUSpec& spec, const Observable& f, const InitialSampler& initial,
                                       double t_max, const std::vector<double>& checkpoints,
                                       const ErgodicOptions& opts = {});

/// {1, 4, 9, …, n² ≤ t_max} ∪ {10^j ≤ t_max}, sorted and unique.
std::vector<double> default_checkpoints(double t_max);

}  // namespace apmarkov
