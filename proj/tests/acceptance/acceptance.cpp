// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "apmarkov/absorbed.hpp"
#include "apmarkov/certificates.hpp"
#include "apmarkov/config.hpp"
#include "apmarkov/ergodic.hpp"
#include "apmarkov/fleming_viot.hpp"
#include "apmarkov/harness.hpp"
#include "apmarkov/ou.hpp"
#include "apmarkov/periodic_limit.hpp"
#include "apmarkov/rng.hpp"
#include "dirichlet.hpp"
#include "frozen.hpp"

using namespace apmarkov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++g_failures;
  std::printf("%s %s (%.1fs of %.0fs) %s\n", o.pass ? "PASS" : "FAIL", name, secs, budget_s, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

double second_moment(const MeshMeasure& m) {
  double s = 0.0;
  for (std::size_t c = 0; c < m.weights.size(); ++c) s += m.mesh.center(c) * m.mesh.center(c) * m.weights[c];
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const auto unit = TimeFunction::constant(1.0);

  criterion("ou_transition_exactness", 1.0, [&] {
    const auto tr = transition_params(unit, 0.0, 1.0);
    const double m_err = rel(tr.m, std::exp(-1.0));
    const double v_err = rel(tr.variance(), (1.0 - std::exp(-2.0)) / 2.0);
    const auto spec = default_ou_spec();
    Stream rng(7, 0);
    double ck = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double s = 5.0 * rng.uniform();
      const double u = s + 2.0 * rng.uniform();
      const double t = u + 2.0 * rng.uniform();
      const auto whole = transition_params(spec.lambda, s, t);
      const auto parts = compose(transition_params(spec.lambda, s, u), transition_params(spec.lambda, u, t));
      ck = std::max({ck, rel(parts.m, whole.m), rel(parts.variance(), whole.variance())});
    }
    return Outcome{m_err <= 1e-9 && v_err <= 1e-9 && ck <= 1e-9,
                   fmt("m rel err %.2e, var rel err %.2e, composition max rel err %.2e", m_err, v_err, ck)};
  });

  criterion("skeleton_invariant_variance", 10.0, [&] {
    const auto tr = transition_params(unit, 0.0, 1.0);
    const Mesh mesh{-6.0, 6.0, 400};
    const auto inv = power_iteration_invariant(KernelMatrix::gaussian(mesh, tr.m, tr.sigma));
    double mean = 0.0, m2 = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells; ++c) {
      mean += mesh.center(c) * inv.measure.weights[c];
      m2 += mesh.center(c) * mesh.center(c) * inv.measure.weights[c];
    }
    const double var = m2 - mean * mean;
    return Outcome{std::fabs(var - 0.5) <= 1e-3, fmt("variance %.6f vs 0.5, %zu iterations", var, inv.iterations)};
  });

  criterion("ergodic_l2_convergence", 300.0, [&] {
    const auto spec = default_ou_spec();
    ErgodicOptions o;
    o.dt = 1e-2;
    o.seed = 1;
    const auto rep = run_l2_experiment(spec, Observable::parse("x^2"), point_mass(0.0), {10.0, 100.0, 1000.0}, 1000, o);
    const auto& last = rep.rows.back();
    const double z = std::fabs(last.mean_avg - frozen::kDefaultOuSquareLimit) / last.stderr_;
    const double slope = rep.variance_slope.slope;
    const bool ok = z <= 3.0 && std::fabs(rep.limit - frozen::kDefaultOuSquareLimit) <= 1e-6 && slope >= -1.3 &&
                    slope <= -0.7;
    return Outcome{ok, fmt("mean %.5f vs limit %.5f (%.2f se), variance slope %.3f", last.mean_avg,
                           frozen::kDefaultOuSquareLimit, z, slope)};
  });

  criterion("ergodic_single_path", 120.0, [&] {
    const auto spec = default_ou_spec();
    const auto f = Observable::parse("x^2");
    ErgodicOptions o;
    o.seed = 1;
    const auto a = run_as_experiment(spec, f, point_mass(0.0), 1e4, {1e4}, o).back();
    o.seed = 2;
    const auto b = run_as_experiment(spec, f, point_mass(0.0), 1e4, {1e4}, o).back();
    const bool ok = a.deviation <= 0.05 && b.deviation <= 0.05 && std::fabs(a.average - b.average) <= 0.1;
    return Outcome{ok, fmt("seed 1 avg %.4f (dev %.4f), seed 2 avg %.4f (dev %.4f)", a.average, a.deviation, b.average,
                           b.deviation)};
  });

  criterion("drift_certificate", 1.0, [&] {
    const auto kernel = ou_kernel(unit);
    const auto psi = LyapunovFunction::quadratic();
    const auto good = check_drift(kernel, psi, 0.0, 1.0, 0.5, 0.94, 1.6);
    const auto bad = check_drift(kernel, psi, 0.0, 1.0, 0.1, 0.94, 1.6);
    return Outcome{good.valid && good.max_residual <= 0.0 && !bad.valid,
                   fmt("theta=0.5 residual %.5f, theta=0.1 residual %.5f", good.max_residual, bad.max_residual)};
  });

  criterion("gaussian_class_minorization", 5.0, [&] {
    const auto cert = gaussian_class_minorization(0.0, 0.6, 0.9);
    const double err = rel(cert.c, 0.6 / 0.9);
    return Outcome{err <= 1e-9 && cert.violations == 0 && cert.samples_checked == 1000,
                   fmt("c rel err %.2e, %zu members, %zu violations", err, cert.samples_checked, cert.violations)};
  });

  criterion("constant_boundary_survival", 120.0, [&] {
    const auto with = survival_probability(unit, 0.0, 0.0, 2.0, 100000, 1);
    AbsorptionOptions raw;
    raw.bridge = false;
    const auto without = survival_probability(unit, 0.0, 0.0, 2.0, 100000, 1, raw);
    const double z = std::fabs(with.p - frozen::kSurvivalUnitT2) / with.stderr_;
    const double bias = (without.p - frozen::kSurvivalUnitT2) / without.stderr_;
    return Outcome{z <= 3.0 && bias > 3.0, fmt("bridge %.5f (%.2f se from %.5f); no bridge %.5f (+%.1f se bias)", with.p,
                                               z, frozen::kSurvivalUnitT2, without.p, bias)};
  });

  criterion("girsanov_identity", 180.0, [&] {
    const auto flat = TimeFunction::constant(1.5);
    const TimeGrid grid(0.0, 0.01, 100);
    ClockPath p;
    Stream rng(3, 0);
    double w = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      p.times.push_back(grid.time(k));
      p.clock.push_back(grid.time(k) / (1.5 * 1.5));
      p.w.push_back(w);
      w += 0.1 * rng.normal();
    }
    const double weight = girsanov_weight(p, flat, 0.0, 1.0);
    const auto h = TimeFunction::parse("1 + 0.1*sin(2*pi*t)");
    const auto direct = survival_probability(h, 0.0, 0.0, 1.0, 100000, 11);
    const auto weighted = girsanov_survival(h, 0.0, 0.0, 1.0, 100000, 12);
    const double z = std::fabs(direct.p - weighted.p) / std::hypot(direct.stderr_, weighted.stderr_);
    return Outcome{weight == 1.0 && z <= 3.0,
                   fmt("constant-h weight %.17g; direct %.5f vs weighted %.5f (%.2f combined se)", weight, direct.p,
                       weighted.p, z)};
  });

  criterion("quasi_ergodic_distribution", 300.0, [&] {
    FlemingViotOptions o;
    o.n_particles = 2000;
    o.dt = 1e-3;
    o.t_end = 50.0;
    o.n_bins = 50;
    std::string detail;
    bool ok = true;
    for (std::uint64_t seed : {1, 2, 3}) {
      o.seed = seed;
      const auto law = fleming_viot(unit, o).lineage.normalized();
      const auto ref = MeshMeasure::from_density(law.mesh, [](double x) { return oracle::qed_density(x); });
      const double tv = tv_distance(law, ref);
      const double m2 = second_moment(law);
      ok = ok && tv <= 0.05 && std::fabs(m2 - frozen::kQedSecondMoment) <= 0.01;
      detail += fmt("seed %d: tv %.4f m2 %.4f; ", static_cast<int>(seed), tv, m2);
    }
    return Outcome{ok, detail + fmt("target m2 %.4f", frozen::kQedSecondMoment)};
  });

  criterion("moving_boundary_periodic_limit", 600.0, [&] {
    const auto pair = default_boundary_pair();
    const auto rows = boundary_convergence_report(pair, 0.0, 2.0, 0.0, {0, 5, 10, 20}, 40000, 1);
    const auto& r0 = rows.front();
    const auto& r20 = rows.back();
    bool ok = r0.gap - r20.gap > 2.0 * std::hypot(r0.stderr_, r20.stderr_);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ok = ok && rows[i].gap - rows[i - 1].gap <= 2.0 * std::hypot(rows[i].stderr_, rows[i - 1].stderr_);
    }
    std::string detail = "gaps";
    for (const auto& r : rows) detail += fmt(" k=%zu:%.5f±%.5f", r.k, r.gap, r.stderr_);

    QedComparisonOptions q;
    q.seeds = {1, 2, 3, 4};
    const auto moving = qed_comparison(pair, q);
    auto control_pair = pair;
    control_pair.h = pair.g;
    const auto control = qed_comparison(control_pair, q);
    ok = ok && moving.tv <= 0.07 && control.tv <= 0.03;
    detail += fmt("; QED tv h vs g %.4f±%.4f, control %.4f±%.4f", moving.tv, moving.bootstrap_se, control.tv,
                  control.bootstrap_se);
    return Outcome{ok, detail};
  });

  criterion("brownian_scaling", 180.0, [&] {
    const double z = 2.0, t = 2.0;
    const auto wide = conditioned_samples(TimeFunction::constant(z), 0.0, 0.0, t, 100000, 21);
    auto narrow = conditioned_samples(unit, 0.0, 0.0, t / (z * z), 100000, 22);
    for (auto& x : narrow) x *= z;
    const Mesh mesh{-z, z, 20};
    const double tv = tv_distance(histogram(mesh, wide), histogram(mesh, narrow));
    return Outcome{tv <= 0.02, fmt("tv %.4f over %zu and %zu survivors", tv, wide.size(), narrow.size())};
  });

  criterion("determinism", 60.0, [&] {
    const std::vector<std::string> configs = {
        R"({"kind": "ergodic", "seed": 4, "params": {"t_values": [2, 4], "replicas": 40, "export_replicas": 2}})",
        R"({"kind": "qsd", "seed": 4, "params": {"particles": 200, "T": 2, "dt": 0.002}})",
        R"({"kind": "survival", "seed": 4, "params": {"paths": 2000, "t": 1, "k_list": [0, 2]}})",
        R"({"kind": "asymptotic-periodicity", "seed": 4})",
    };
    const fs::path root = fs::temp_directory_path() / "apmarkov_acceptance_determinism";
    std::size_t compared = 0;
    bool ok = true;
    std::ostringstream diag;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto cfg = parse_config(configs[i]);
      std::vector<fs::path> outs[2];
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = root / std::to_string(i) / std::to_string(rep);
        fs::remove_all(dir);
        const auto res = run_experiment(cfg, dir, diag);
        ok = ok && res.exit_code == kExitOk;
        outs[rep] = res.artifacts;
      }
      for (std::size_t a = 0; a < outs[0].size(); ++a) {
        if (outs[0][a].extension() != ".csv") continue;
        ok = ok && slurp(outs[0][a]) == slurp(outs[1][a]);
        ++compared;
      }
    }
    fs::remove_all(root);
    return Outcome{ok && compared >= configs.size(), fmt("%zu CSV artifacts compared byte for byte", compared)};
  });

  return g_failures == 0 ? 0 : 1;
}
