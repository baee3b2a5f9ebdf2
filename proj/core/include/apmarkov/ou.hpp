#pragma once

#include <string>
#include <vector>

#include "apmarkov/ensemble.hpp"
#include "apmarkov/quadrature.hpp"
#include "apmarkov/time_function.hpp"

namespace apmarkov {

/// dX = dW − λ(t) X dt together with its γ-periodic auxiliary drift g.
struct OUSpec {
  TimeFunction lambda;
  TimeFunction g;
  double gamma = 1.0;
};

/// g(t) = 1 + 0.5 sin(2πt), γ = 1, λ(t) = g(t)(1 + 0.3 e^{−0.7t}).
OUSpec default_ou_spec();

/// Law of X_t given X_s = x is Normal(m·x, sigma²).
struct GaussianTransition {
  double m = 1.0;
  double sigma = 0.0;

  double variance() const { return sigma * sigma; }
  bool operator==(const GaussianTransition&) const = default;
};

struct TransitionOptions {
  double max_substep = 2e-3;
  std::size_t min_substeps = 4;
};

/// m = exp(−∫_s^t λ), σ² = m² ∫_s^t exp(2∫_s^u λ) du, from one RK4 pass over
/// the coupled system A' = λ, W' = 1 − 2λW where W(u) = σ²(s,u). Working with
/// W instead of ∫e^{2A} keeps long intervals from overflowing.
GaussianTransition transition_params(const TimeFunction& drift, double s, double t,
                                     const TransitionOptions& opts = {});

/// Transition over [s,t] from the pieces [s,u] then [u,t].
GaussianTransition compose(const GaussianTransition& first, const GaussianTransition& second);

/// Per-step transitions of one drift on a fixed grid.
class TransitionTable {
 public:
  TransitionTable(const TimeFunction& drift, const TimeGrid& grid, const TransitionOptions& opts = {});

  const TimeGrid& grid() const { return grid_; }
  const GaussianTransition& operator[](std::size_t step) const { return steps_[step]; }
  std::size_t size() const { return steps_.size(); }

 private:
  TimeGrid grid_;
  std::vector<GaussianTransition> steps_;
};

struct StepperOptions {
  /// Force σ = 0 (deterministic mean flow), used in tests.
  bool zero_noise = false;
  TransitionOptions transition;
};

/// Exact-in-law sampler X' = m·x + σ·Z on `grid` for λ (P) or g (Q, when
/// use_auxiliary). Transitions are tabulated up front.
Stepper ou_stepper(const OUSpec& spec, bool use_auxiliary, const TimeGrid& grid, const StepperOptions& opts = {});

/// Euler–Maruyama sampler for the same SDE; cross-check only.
Stepper euler_stepper(const TimeFunction& drift);

/// inf over sampled s ∈ [0, s_max] of (1/γ)∫_s^{s+γ} drift.
double c_inf_estimate(const TimeFunction& drift, double gamma, double s_max, std::size_t n_samples = 400);

struct OUValidation {
  bool ok = true;
  double c_inf = 0.0;
  std::vector<std::string> problems;
};

/// Checks declared boundedness of λ, c_inf > 0, and that g declares period γ.
OUValidation validate(const OUSpec& spec, double horizon = 20.0);

/// TV distance between Normal(m1, s1²) and Normal(m2, s2²) by adaptive
/// quadrature of ½|p1 − p2|, split at the density crossings.
double gaussian_tv(double m1, double s1, double m2, double s2);

struct PeriodicityRow {
  std::size_t k = 0;
  std::size_t n = 0;
  double s = 0.0;
  double x = 0.0;
  double tv = 0.0;
};

/// For each k and probe x: TV(δ_x P_{s+kγ, s+(k+n)γ}, δ_x Q_{s, s+nγ}).
std::vector<PeriodicityRow> asymptotic_periodicity_report(const OUSpec& spec, double s, std::size_t n,
                                                          const std::vector<std::size_t>& k_values,
                                                          const std::vector<double>& probes = {0.0, 1.0});

}  // namespace apmarkov
