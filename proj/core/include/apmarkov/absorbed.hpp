#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apmarkov/ensemble.hpp"
#include "apmarkov/quadrature.hpp"
#include "apmarkov/stats.hpp"
#include "apmarkov/time_function.hpp"

namespace apmarkov {

/// Moving boundary h and its γ-periodic limit g, with h ≤ g.
struct BoundaryPair {
  TimeFunction h;
  TimeFunction g;
  double gamma = 1.0;
  std::size_t n0 = 1;
};

/// g(t) = 1 + 0.25 sin(2πt), γ = 1, h(t) = g(t) / (1 + 0.3 e^{−0.7t}).
BoundaryPair default_boundary_pair();

struct BoundaryValidation {
  bool ok = true;
  double h_min = 0.0;
  double h_max = 0.0;
  std::vector<std::string> problems;
};

/// h ≤ g on a dense grid, h_min > 0, and the running-infimum condition: for
/// sampled s, the minimum of h over [s, s + horizon] is reached by s + n0·γ.
BoundaryValidation validate(const BoundaryPair& pair, double horizon = 20.0, std::size_t n_points = 20001);

/// Absorption test for one Euler step of Brownian motion inside (−h, h).
/// `u` is the step's uniform; bridge crossing probabilities use the boundary
/// linearized on the step. Returns true when the particle is killed.
inline bool killed_in_step(double x0, double x1, double h0, double h1, double var, double u, bool bridge) {
  if (x1 >= h1 || x1 <= -h1) return true;
  if (!bridge) return false;
  const double e_up = 2.0 * (h0 - x0) * (h1 - x1) / var;
  const double e_lo = 2.0 * (h0 + x0) * (h1 + x1) / var;
  // u >= 2^-54, so probabilities below e^-38 can never trigger.
  if (e_up > 38.0 && e_lo > 38.0) return false;
  const double p_up = e_up > 38.0 ? 0.0 : std::exp(-e_up);
  const double p_lo = e_lo > 38.0 ? 0.0 : std::exp(-e_lo);
  return u < p_up + p_lo - p_up * p_lo;
}

/// Values of h at the points of a grid.
struct BoundarySchedule {
  TimeGrid grid;
  std::vector<double> h;

  BoundarySchedule(const TimeFunction& boundary, const TimeGrid& grid);
  double max() const;
};

struct AbsorptionOptions {
  double dt = 1e-3;
  bool bridge = true;
};

struct AbsorbedPath {
  TimeGrid grid;
  std::vector<double> states;  // up to and including the exit step
  std::optional<double> tau;
  bool survived() const { return !tau.has_value(); }
};

/// One absorbed Brownian path started at time 0 from x0 on [0, T].
AbsorbedPath simulate_absorbed(const TimeFunction& h, double x0, double T, std::uint64_t seed,
                               const AbsorptionOptions& opts = {}, std::uint64_t stream = 0);

struct ProbabilityEstimate {
  double p = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Per-path survival indicators for P_{s,x}[τ_h > s + duration]; path r uses
/// Stream(seed, r). Identical seeds give common random numbers across
/// boundaries.
std::vector<std::uint8_t> survival_indicators(const TimeFunction& h, double x0, double s, double duration,
                                              std::size_t n_paths, std::uint64_t seed,
                                              const AbsorptionOptions& opts = {});

ProbabilityEstimate survival_probability(const TimeFunction& h, double x0, double s, double duration,
                                         std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts = {});

/// Positions X_{s+duration} of the paths that survive.
std::vector<double> conditioned_samples(const TimeFunction& h, double x0, double s, double duration,
                                        std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts = {});

/// A path w sampled on the clock I^h(u) = ∫_0^u h^{-2}, paired with the
/// physical times u.
struct ClockPath {
  std::vector<double> times;
  std::vector<double> clock;
  std::vector<double> w;
};

class ClockMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (h')² − (hh')' from the symbolic derivative of the product h·h'.
double girsanov_integrand_unsimplified(const TimeFunction& h, double u);
/// −h·h'', the simplified integrand.
double girsanov_integrand(const TimeFunction& h, double u);

/// √(h(t)/h(s)) exp(−½[h'(t)h(t)w_{I(t)}² − h'(s)h(s)w_{I(s)}² + ∫_s^t w_{I(u)}²(−h h'')(u) du]),
/// the u-integral by the trapezoid rule on the path's physical times.
double girsanov_weight(const ClockPath& path, const TimeFunction& h, double s, double t);

/// P_{s,x}[τ_h > s + duration] as E[weight · 1{unit-boundary BM survives on
/// the I^h clock}], started from x/h(s).
ProbabilityEstimate girsanov_survival(const TimeFunction& h, double x0, double s, double duration,
                                      std::size_t n_paths, std::uint64_t seed, const AbsorptionOptions& opts = {});

struct BoundaryConvergenceRow {
  std::size_t k = 0;
  double p_h = 0.0;            // P_{s+kγ,x}[τ_h > t+kγ]
  double p_g = 0.0;            // P_{s,x}[τ_g > t]
  double gap = 0.0;            // |p_h − p_g|
  double stderr_ = 0.0;        // of the gap under common random numbers
  double sandwich_prob = 0.0;  // P[τ_h ≤ t+kγ < τ_g]
};

/// Common random numbers across h, g and all k; requires s ≤ t.
std::vector<BoundaryConvergenceRow> boundary_convergence_report(const BoundaryPair& pair, double s, double t,
                                                                double x, const std::vector<std::size_t>& k_values,
                                                                std::size_t n_paths, std::uint64_t seed,
                                                                const AbsorptionOptions& opts = {});

/// Cell-wise minimum of several laws on one mesh: c = its mass, ν = it
/// normalized (ν is all zeros when c = 0).
struct Minorant {
  double c = 0.0;
  MeshMeasure nu;
};

Minorant minorize(const std::vector<MeshMeasure>& laws);

struct ConditionalMinorization {
  double c1 = 0.0;
  double c1_lower = 0.0;  // 95% lower bound from binomial cell errors
  MeshMeasure nu_hat;
  /// laws[time][probe]
  std::vector<std::vector<MeshMeasure>> laws;
  std::vector<std::vector<std::size_t>> survivors;
  std::string suggestion;  // non-empty when the mesh is too fine for the data
};

/// Monte Carlo estimate of P_{s,x}[W_{s+t} ∈ · | τ_h > s+t] ≥ c1 ν over the
/// window offsets `t_values` and the probe states.
ConditionalMinorization conditional_minorization_estimate(const TimeFunction& h, double s,
                                                          const std::vector<double>& t_values,
                                                          const std::vector<double>& probes, std::size_t n_paths,
                                                          std::size_t n_cells, std::uint64_t seed,
                                                          const AbsorptionOptions& opts = {});

}  // namespace apmarkov
