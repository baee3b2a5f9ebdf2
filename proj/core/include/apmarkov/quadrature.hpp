#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "apmarkov/time_function.hpp"

namespace apmarkov {

/// Raised by adaptive quadrature when the error target cannot be met within
/// the subdivision budget. The message names the offending interval.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double a, double b)
      : std::runtime_error(what), a_(a), b_(b) {}
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

 private:
  double a_;
  double b_;
};

/// Uniform time grid t_k = t0 + k*dt, k = 0..n_steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n_steps = 0;

  TimeGrid() = default;
  TimeGrid(double t0_, double dt_, std::size_t n_steps_);

  /// Grid covering [t0, t1] with step as close to `dt_target` as possible
  /// without exceeding it.
  static TimeGrid covering(double t0, double t1, double dt_target);

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double end() const { return time(n_steps); }
  std::size_t size() const { return n_steps + 1; }

  /// Index k with time(k) == t up to 1e-9 relative; throws otherwise.
  std::size_t index_of(double t) const;

  bool operator==(const TimeGrid&) const = default;
};

using ScalarFn = std::function<double(double)>;

struct QuadratureOptions {
  double tol = 1e-10;
  int max_depth = 48;
  std::size_t max_evaluations = 5'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Adaptive Simpson quadrature with interval bisection and Richardson
/// correction. Requires a <= b.
QuadratureResult integrate_adaptive(const ScalarFn& f, double a, double b,
                                    const QuadratureOptions& opts = {});

double integrate(const ScalarFn& f, double a, double b, double tol = 1e-10);
double integrate(const TimeFunction& f, double a, double b, double tol = 1e-10);

/// F(t_k) = ∫_a^{t_k} f, one fourth-order step per grid cell. grid.t0 must
/// equal `a`.
std::vector<double> cumulative_integral(const TimeFunction& f, double a, const TimeGrid& grid);
std::vector<double> cumulative_integral(const ScalarFn& f, double a, const TimeGrid& grid);

/// Nodes and weights for E[f(Z)], Z ~ N(0,1) (probabilists' Gauss–Hermite).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double expectation(const ScalarFn& f, double mean = 0.0, double sd = 1.0) const;
};

GaussHermiteRule gauss_hermite(std::size_t n);

}  // namespace apmarkov
