#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "apmarkov/quadrature.hpp"
#include "apmarkov/rng.hpp"

namespace apmarkov {

/// Thrown when a stepper or simulation fails; carries replica/step context.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One-step kernel sampler: returns X_{t_{k+1}} given X_{t_k} = x.
using Stepper = std::function<double(std::size_t step, double t_from, double t_to, double x, Stream& rng)>;

/// Draws X_{t_0}.
using InitialSampler = std::function<double(Stream& rng)>;

InitialSampler point_mass(double x0);
InitialSampler normal_initial(double mean, double sd);
InitialSampler uniform_initial(double lo, double hi);

/// Bounded (or polynomially dominated) test function on the state space.
struct Observable {
  std::string name;
  std::function<double(double)> fn;
  std::optional<double> sup_norm;

  double operator()(double x) const { return fn(x); }

  /// Parse an expression in `x` (same grammar as time functions).
  static Observable parse(const std::string& expr, std::optional<double> sup_norm = std::nullopt);
  static Observable constant_one();
};

/// n_replicas × (n_steps+1) states, row-major by replica.
struct PathEnsemble {
  TimeGrid grid;
  std::size_t n_replicas = 0;
  std::uint64_t seed = 0;
  std::vector<double> states;

  double state(std::size_t replica, std::size_t step) const {
    return states[replica * grid.size() + step];
  }
  std::span<const double> path(std::size_t replica) const {
    return {states.data() + replica * grid.size(), grid.size()};
  }
};

/// Replica r draws from Stream(seed, r); the result is identical for any
/// thread count.
PathEnsemble simulate_ensemble(const Stepper& stepper, const InitialSampler& initial, const TimeGrid& grid,
                               std::size_t n_replicas, std::uint64_t seed, unsigned threads = 1);

/// Streaming variant: `visit(replica, path)` is called once per replica with
/// the full path; nothing is retained between replicas on the same worker.
void for_each_path(const Stepper& stepper, const InitialSampler& initial, const TimeGrid& grid,
                   std::size_t n_replicas, std::uint64_t seed,
                   const std::function<void(std::size_t, std::span<const double>)>& visit,
                   unsigned threads = 1);

/// Trapezoidal (1/t)∫_{t0}^{t0+t} f(X_s) ds along a grid path; t must be a
/// positive multiple of the grid step inside the span.
double time_average(std::span<const double> path, const TimeGrid& grid, const Observable& f, double t);

/// Running trapezoid accumulator for streaming paths.
class RunningTimeAverage {
 public:
  RunningTimeAverage(const Observable& f, double dt) : f_(&f), dt_(dt) {}

  void push(double x);
  double integral() const { return integral_; }
  double elapsed() const { return elapsed_; }
  double average() const;

 private:
  const Observable* f_;
  double dt_;
  double integral_ = 0.0;
  double elapsed_ = 0.0;
  double last_ = 0.0;
  bool started_ = false;
};

/// Runs body(i) for i in [0,n) on up to `threads` workers, static contiguous
/// partition. Exceptions are rethrown on the caller after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// CSV `replica,step,time,state`.
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens);

/// One JSON line: {"seed":..,"model":..,"grid":{..},"n_replicas":..}.
void write_ensemble_metadata(std::ostream& os, const PathEnsemble& ens, const std::string& model_json);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace apmarkov
