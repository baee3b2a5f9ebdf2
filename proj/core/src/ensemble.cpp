#include "apmarkov/ensemble.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "apmarkov/time_function.hpp"

namespace apmarkov {

InitialSampler point_mass(double x0) {
  return [x0](Stream&) { return x0; };
}

InitialSampler normal_initial(double mean, double sd) {
  return [mean, sd](Stream& rng) { return mean + sd * rng.normal(); };
}

InitialSampler uniform_initial(double lo, double hi) {
  return [lo, hi](Stream& rng) { return lo + (hi - lo) * rng.uniform(); };
}

Observable Observable::parse(const std::string& expr, std::optional<double> sup_norm) {
  auto f = TimeFunction::parse(expr);
  return Observable{expr, [f](double x) { return f(x); }, sup_norm};
}

Observable Observable::constant_one() { return Observable{"1", [](double) { return 1.0; }, 1.0}; }

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

void run_replica(const Stepper& stepper, const InitialSampler& initial, const TimeGrid& grid,
                 std::uint64_t seed, std::size_t r, std::span<double> out) {
  Stream rng(seed, r);
  double x = initial(rng);
  out[0] = x;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    try {
      x = stepper(k, grid.time(k), grid.time(k + 1), x, rng);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "stepper failed at replica " << r << ", step " << k << ": " << e.what();
      throw SimulationError(os.str());
    }
    if (!std::isfinite(x)) {
      std::ostringstream os;
      os << "stepper produced a non-finite state at replica " << r << ", step " << k;
      throw SimulationError(os.str());
    }
    out[k + 1] = x;
  }
}

}  // namespace

PathEnsemble simulate_ensemble(const Stepper& stepper, const InitialSampler& initial, const TimeGrid& grid,
                               std::size_t n_replicas, std::uint64_t seed, unsigned threads) {
  if (n_replicas < 1) throw std::invalid_argument("simulate_ensemble: n_replicas must be >= 1");
  PathEnsemble ens;
  ens.grid = grid;
  ens.n_replicas = n_replicas;
  ens.seed = seed;
  ens.states.assign(n_replicas * grid.size(), 0.0);
  parallel_for(n_replicas, threads, [&](std::size_t r) {
    run_replica(stepper, initial, grid, seed, r, {ens.states.data() + r * grid.size(), grid.size()});
  });
  return ens;
}

void for_each_path(const Stepper& stepper, const InitialSampler& initial, const TimeGrid& grid,
                   std::size_t n_replicas, std::uint64_t seed,
                   const std::function<void(std::size_t, std::span<const double>)>& visit, unsigned threads) {
  if (n_replicas < 1) throw std::invalid_argument("for_each_path: n_replicas must be >= 1");
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n_replicas));
  std::vector<std::vector<double>> buffers(workers, std::vector<double>(grid.size()));
  // Same static partition as parallel_for, one scratch buffer per worker.
  parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t w) {
    const std::size_t lo = n_replicas * w / workers;
    const std::size_t hi = n_replicas * (w + 1) / workers;
    auto& buf = buffers[w];
    for (std::size_t r = lo; r < hi; ++r) {
      run_replica(stepper, initial, grid, seed, r, buf);
      visit(r, buf);
    }
  });
}

double time_average(std::span<const double> path, const TimeGrid& grid, const Observable& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("time_average: t must be positive");
  if (path.size() != grid.size()) throw std::invalid_argument("time_average: path length does not match grid");
  const std::size_t k = grid.index_of(grid.t0 + t);
  if (k == 0) throw std::invalid_argument("time_average: t must span at least one step");
  double acc = 0.5 * (f(path[0]) + f(path[k]));
  for (std::size_t i = 1; i < k; ++i) acc += f(path[i]);
  return acc * grid.dt / (static_cast<double>(k) * grid.dt);
}

void RunningTimeAverage::push(double x) {
  const double v = (*f_)(x);
  if (started_) {
    integral_ += 0.5 * dt_ * (last_ + v);
    elapsed_ += dt_;
  }
  last_ = v;
  started_ = true;
}

double RunningTimeAverage::average() const {
  if (!(elapsed_ > 0.0)) throw std::logic_error("RunningTimeAverage: no elapsed time");
  return integral_ / elapsed_;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens) {
  os << "replica,step,time,state\n";
  for (std::size_t r = 0; r < ens.n_replicas; ++r) {
    for (std::size_t k = 0; k < ens.grid.size(); ++k) {
      os << r << ',' << k << ',' << format_double(ens.grid.time(k)) << ',' << format_double(ens.state(r, k))
         << '\n';
    }
  }
}

void write_ensemble_metadata(std::ostream& os, const PathEnsemble& ens, const std::string& model_json) {
  os << "{\"seed\":" << ens.seed << ",\"model\":" << (model_json.empty() ? "null" : model_json)
     << ",\"grid\":{\"t0\":" << format_double(ens.grid.t0) << ",\"dt\":" << format_double(ens.grid.dt)
     << ",\"n_steps\":" << ens.grid.n_steps << "},\"n_replicas\":" << ens.n_replicas << "}\n";
}

}  // namespace apmarkov
