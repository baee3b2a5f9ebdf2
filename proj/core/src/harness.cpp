#include "apmarkov/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "apmarkov/absorbed.hpp"
#include "apmarkov/certificates.hpp"
#include "apmarkov/ergodic.hpp"
#include "apmarkov/fleming_viot.hpp"
#include "apmarkov/ou.hpp"
#include "apmarkov/periodic_limit.hpp"
#include "json.hpp"

#ifndef APMARKOV_VERSION
#define APMARKOV_VERSION "0.0.0"
#endif

namespace apmarkov {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view version() noexcept { return APMARKOV_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

// Thrown when a computation yields NaN or infinity in an artifact.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericFailure(std::string("non-finite value in column ") + what);
  return v;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : os_(path, std::ios::binary) {
    if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }
  template <typename... Cols>
  void row(const Cols&... cols) {
    std::size_t i = 0;
    ((os_ << (i++ ? "," : "") << cell(cols)), ...);
    os_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::ofstream os_;
};

void write_jsonl(const fs::path& path, const std::vector<json>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& r : records) os << r.dump() << '\n';
}

void require_valid(const OUSpec& spec) {
  const auto v = validate(spec);
  if (!v.ok) {
    std::string msg;
    for (const auto& p : v.problems) msg += (msg.empty() ? "" : "; ") + p;
    throw ConfigError("model", msg);
  }
}

void require_valid(const BoundaryPair& pair) {
  const auto v = validate(pair);
  if (!v.ok) {
    std::string msg;
    for (const auto& p : v.problems) msg += (msg.empty() ? "" : "; ") + p;
    throw ConfigError("model", msg);
  }
}

LyapunovFunction make_psi(const std::string& spec) {
  if (spec == "quadratic") return LyapunovFunction::quadratic();
  if (spec == "constant") return LyapunovFunction::constant();
  const auto fn = TimeFunction::parse(spec);
  return LyapunovFunction::from_function(spec, [fn](double x) { return fn(x); });
}

json run_ergodic(const ExperimentConfig& c, const fs::path& out, std::vector<fs::path>& artifacts) {
  const auto& p = c.ergodic;
  require_valid(*c.ou);
  const auto f = Observable::parse(p.observable);
  ErgodicOptions o;
  o.dt = p.dt;
  o.seed = c.seed;
  o.threads = c.threads;
  o.use_auxiliary = p.auxiliary;
  if (p.limit) o.limit = *p.limit;
  const auto rep = run_l2_experiment(*c.ou, f, point_mass(p.x0), p.t_values, p.replicas, o);

  artifacts.push_back(out);
  CsvWriter csv(out, {"t", "mean_avg", "l2_err", "var", "stderr"});
  for (const auto& r : rep.rows) {
    csv.row(r.t, checked(r.mean_avg, "mean_avg"), checked(r.l2_err, "l2_err"), checked(r.var, "var"),
            checked(r.stderr_, "stderr"));
  }

  if (p.export_replicas > 0) {
    const auto grid = TimeGrid(0.0, p.dt, static_cast<std::size_t>(std::llround(p.t_values.back() / p.dt)));
    const auto ens = simulate_ensemble(ou_stepper(*c.ou, p.auxiliary, grid), point_mass(p.x0), grid,
                                       p.export_replicas, c.seed, c.threads);
    const fs::path csv_path = out.parent_path() / "ensemble.csv";
    const fs::path meta_path = out.parent_path() / "ensemble.meta.jsonl";
    std::ofstream e(csv_path, std::ios::binary), m(meta_path, std::ios::binary);
    if (!e || !m) throw std::runtime_error("cannot write ensemble export");
    write_ensemble_csv(e, ens);
    const json model = {{"lambda", c.ou->lambda.to_string()},
                        {"g", c.ou->g.to_string()},
                        {"gamma", c.ou->gamma},
                        {"semigroup", p.auxiliary ? "Q" : "P"}};
    write_ensemble_metadata(m, ens, model.dump());
    artifacts.push_back(csv_path);
    artifacts.push_back(meta_path);
  }
  json s = {{"limit", rep.limit}, {"replicas", rep.n_replicas}};
  if (rep.slope_available) s["variance_slope"] = rep.variance_slope.slope;
  return s;
}

json run_drift(const ExperimentConfig& c, const fs::path& out, std::vector<fs::path>& artifacts) {
  const auto& p = c.drift;
  require_valid(*c.ou);
  const auto kernel = ou_kernel(c.ou->lambda);
  const auto psi = make_psi(p.psi);
  const PointMesh mesh{p.mesh_lo, p.mesh_hi, p.mesh_points};
  const auto cert = check_drift(kernel, psi, p.s, p.t1, p.theta, p.C, p.k_edge, mesh);
  const double growth = check_growth(kernel, psi, p.s, p.growth_t, mesh);
  const double c_comb = std::max(p.C, growth);
  std::vector<json> rec;
  rec.push_back({{"record", "drift"},
                 {"psi", psi.name},
                 {"s", cert.s},
                 {"t1", cert.t1},
                 {"theta", cert.theta},
                 {"C", cert.C},
                 {"k_edge", cert.k_edge},
                 {"max_residual", checked(cert.max_residual, "max_residual")},
                 {"argmax_x", cert.argmax_x},
                 {"valid", cert.valid}});
  rec.push_back({{"record", "growth"}, {"s", p.s}, {"t_values", p.growth_t}, {"sup_ratio", checked(growth, "sup_ratio")}});
  if (p.theta < 1.0) {
    rec.push_back({{"record", "maj"}, {"theta", p.theta}, {"C", c_comb}, {"bound", maj_bound(p.theta, c_comb)}});
  }
  write_jsonl(out, rec);
  artifacts.push_back(out);
  return {{"valid", cert.valid}, {"max_residual", cert.max_residual}};
}

json run_minorization(const ExperimentConfig& c, const fs::path& out, std::vector<fs::path>& artifacts) {
  const auto& p = c.minorization;
  require_valid(*c.ou);
  const auto kernel = ou_kernel(c.ou->lambda);
  MinorizationCheckOptions mo;
  mo.n_samples = p.samples;
  mo.mesh_points = p.mesh_points;
  mo.seed = c.seed;
  const auto cert = ou_minorization_certificate(kernel, p.k_edge, p.s_values, p.t1, p.n0, mo);
  const auto doeblin =
      doeblin_from_minorization(cert, p.s_values, p.probes, kernel, PointMesh{p.mesh_lo, p.mesh_hi, p.mesh_points});
  std::vector<json> rec;
  rec.push_back({{"record", "minorization"},
                 {"a", cert.a},
                 {"b_minus", cert.b_minus},
                 {"b_plus", cert.b_plus},
                 {"c", checked(cert.c, "c")},
                 {"nu_mass", cert.nu_mass},
                 {"n0", cert.n0},
                 {"t1", cert.t1},
                 {"samples_checked", cert.samples_checked},
                 {"violations", cert.violations},
                 {"worst_margin", cert.worst_margin}});
  rec.push_back({{"record", "doeblin"},
                 {"valid", doeblin.valid},
                 {"degenerate", doeblin.degenerate},
                 {"worst_margin", doeblin.worst_margin},
                 {"worst_s", doeblin.worst_s},
                 {"worst_x", doeblin.worst_x}});
  write_jsonl(out, rec);
  artifacts.push_back(out);
  return {{"c", cert.c}, {"violations", cert.violations}, {"doeblin_valid", doeblin.valid}};
}

json run_qsd(const ExperimentConfig& c, const fs::path& out, std::vector<fs::path>& artifacts) {
  const auto& p = c.qsd;
  require_valid(*c.boundary);
  FlemingViotOptions o;
  o.n_particles = p.particles;
  o.dt = p.dt;
  o.t_end = p.T;
  o.seed = c.seed;
  o.n_bins = p.bins;
  o.burn_in = p.burn_in;
  o.x0 = p.x0;
  o.bridge = p.bridge;
  const auto res = fleming_viot(c.boundary->h, o);
  const auto m = (p.measure == "forward" ? res.forward : res.lineage).normalized();
  artifacts.push_back(out);
  CsvWriter csv(out, {"bin_center", "mass"});
  for (std::size_t i = 0; i < m.weights.size(); ++i) csv.row(m.mesh.center(i), checked(m.weights[i], "mass"));
  return {{"absorptions", res.absorptions}, {"mean", m.mean()}, {"second_moment", m.expectation([](double x) {
                                                                   return x * x;
                                                                 })}};
}

json run_survival(const ExperimentConfig& c, const fs::path& out, std::vector<fs::path>& artifacts) {
  const auto& p = c.survival;
  require_valid(*c.boundary);
  AbsorptionOptions o;
  o.dt = p.dt;
  o.bridge = p.bridge;
  const auto rows = boundary_convergence_report(*c.boundary, p.s, p.t, p.x, p.k_list, p.paths, c.seed, o);
  artifacts.push_back(out);
  CsvWriter csv(out, {"k", "gap", "stderr", "sandwich_prob"});
  for (const auto& r : rows) {
    csv.row(r.k, checked(r.gap, "gap"), checked(r.stderr_, "stderr"), checked(r.sandwich_prob, "sandwich_prob"));
  }
  return {{"rows", rows.size()}};
}

json run_periodicity(const ExperimentConfig& c, const fs::path& out, std::vector<fs::path>& artifacts) {
  const auto& p = c.periodicity;
  require_valid(*c.ou);
  const auto rows = asymptotic_periodicity_report(*c.ou, p.s, p.n, p.k_list, p.probes);
  artifacts.push_back(out);
  CsvWriter csv(out, {"k", "n", "s", "tv"});
  // One row per k: the largest TV over the probe states.
  for (std::size_t k : p.k_list) {
    double tv = 0.0;
    for (const auto& r : rows) {
      if (r.k == k) tv = std::max(tv, checked(r.tv, "tv"));
    }
    csv.row(k, p.n, p.s, tv);
  }
  return {{"probes", p.probes}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& diag) {
  RunResult res;
  try {
    validate_config(cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    const fs::path out = out_dir / (cfg.output.empty() ? default_output(cfg.kind) : cfg.output);
    json summary;
    switch (cfg.kind) {
      case ExperimentKind::Ergodic: summary = run_ergodic(cfg, out, res.artifacts); break;
      case ExperimentKind::Drift: summary = run_drift(cfg, out, res.artifacts); break;
      case ExperimentKind::Minorization: summary = run_minorization(cfg, out, res.artifacts); break;
      case ExperimentKind::Qsd: summary = run_qsd(cfg, out, res.artifacts); break;
      case ExperimentKind::Survival: summary = run_survival(cfg, out, res.artifacts); break;
      case ExperimentKind::AsymptoticPeriodicity: summary = run_periodicity(cfg, out, res.artifacts); break;
    }
    const std::string canonical = serialize_config(cfg);
    json manifest = {{"version", std::string(version())},
                     {"kind", std::string(to_string(cfg.kind))},
                     {"config_hash", fnv1a_hex(canonical)},
                     {"seed", cfg.seed},
                     {"threads", cfg.threads},
                     {"summary", summary},
                     {"timestamp", utc_timestamp()}};
    json names = json::array();
    for (const auto& a : res.artifacts) names.push_back(a.filename().string());
    manifest["artifacts"] = names;
    const fs::path mpath = out_dir / "manifest.jsonl";
    std::ofstream m(mpath, std::ios::app | std::ios::binary);
    if (!m) throw std::runtime_error("cannot append to " + mpath.string());
    m << manifest.dump() << '\n';
    res.artifacts.push_back(mpath);
    res.message = "ok";
  } catch (const ConfigError& e) {
    res.exit_code = kExitValidation;
    res.message = std::string("invalid config: ") + e.what();
  } catch (const ParseError& e) {
    res.exit_code = kExitValidation;
    res.message = std::string("invalid expression: ") + e.what();
  } catch (const std::invalid_argument& e) {
    res.exit_code = kExitValidation;
    res.message = std::string("invalid input: ") + e.what();
  } catch (const std::exception& e) {
    res.exit_code = kExitNumeric;
    res.message = std::string("numeric failure: ") + e.what();
  }
  if (res.exit_code != kExitOk) diag << "error: " << res.message << '\n';
  return res;
}

RunResult run(const RunRequest& req, std::ostream& diag) {
  RunResult res;
  std::stringstream text;
  if (req.config_path.empty() && req.expect_kind) {
    text << R"({"kind": ")" << to_string(*req.expect_kind) << R"("})";
  } else {
    std::ifstream in(req.config_path, std::ios::binary);
    if (!in) {
      res.exit_code = kExitValidation;
      res.message = "cannot read config file " + req.config_path.string();
      diag << "error: " << res.message << '\n';
      return res;
    }
    text << in.rdbuf();
  }
  ExperimentConfig cfg;
  try {
    cfg = parse_config(text.str());
    if (req.expect_kind && cfg.kind != *req.expect_kind) {
      throw ConfigError("kind", "expected '" + std::string(to_string(*req.expect_kind)) + "', config has '" +
                                    std::string(to_string(cfg.kind)) + "'");
    }
  } catch (const std::invalid_argument& e) {
    res.exit_code = kExitValidation;
    res.message = std::string("invalid config: ") + e.what();
    diag << "error: " << res.message << '\n';
    return res;
  }
  if (req.seed) cfg.seed = *req.seed;
  if (req.threads) cfg.threads = *req.threads;
  if (req.k_list) cfg.survival.k_list = *req.k_list;
  if (req.output) cfg.output = *req.output;
  return run_experiment(cfg, req.out_dir, diag);
}

}  // namespace apmarkov
