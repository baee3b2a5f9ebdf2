#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apmarkov/absorbed.hpp"
#include "apmarkov/ou.hpp"

namespace apmarkov {

/// Invalid config: unknown key, wrong type, bad value. `field` is the dotted
/// path of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { Ergodic, Drift, Minorization, Qsd, Survival, AsymptoticPeriodicity };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);

struct ErgodicParams {
  std::string observable = "x^2";
  double x0 = 0.0;
  double dt = 1e-2;
  std::vector<double> t_values{10.0, 100.0, 1000.0};
  std::size_t replicas = 1000;
  bool auxiliary = false;
  std::optional<double> limit;
  /// When positive, also export this many full paths as an ensemble CSV.
  std::size_t export_replicas = 0;
  bool operator==(const ErgodicParams&) const = default;
};

struct DriftParams {
  std::string psi = "quadratic";  // "quadratic", "constant" or an expression in x
  double theta = 0.5;
  double C = 0.94;
  double k_edge = 1.6;
  double s = 0.0;
  double t1 = 1.0;
  std::vector<double> growth_t{0.25, 0.5, 0.75, 1.0};
  double mesh_lo = -8.0;
  double mesh_hi = 8.0;
  std::size_t mesh_points = 2001;
  bool operator==(const DriftParams&) const = default;
};

struct MinorizationParams {
  double k_edge = 1.6;
  double t1 = 1.0;
  std::size_t n0 = 1;
  std::vector<double> s_values{0.0, 0.25, 0.5, 0.75};
  std::vector<double> probes{-1.6, 0.0, 1.6};
  std::size_t samples = 1000;
  std::size_t mesh_points = 2001;
  double mesh_lo = -8.0;
  double mesh_hi = 8.0;
  bool operator==(const MinorizationParams&) const = default;
};

struct QsdParams {
  std::size_t particles = 2000;
  double dt = 1e-3;
  double T = 50.0;
  std::size_t bins = 50;
  double burn_in = 0.0;
  double x0 = 0.0;
  bool bridge = true;
  std::string measure = "lineage";  // or "forward"
  bool operator==(const QsdParams&) const = default;
};

struct SurvivalParams {
  double s = 0.0;
  double t = 2.0;
  double x = 0.0;
  std::vector<std::size_t> k_list{0, 5, 10, 20};
  std::size_t paths = 20000;
  double dt = 1e-3;
  bool bridge = true;
  bool operator==(const SurvivalParams&) const = default;
};

struct PeriodicityParams {
  double s = 0.0;
  std::size_t n = 1;
  std::vector<std::size_t> k_list{0, 1, 2, 5, 10, 20};
  std::vector<double> probes{0.0, 1.0};
  bool operator==(const PeriodicityParams&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Ergodic;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Artifact file name inside the output directory; empty picks the default.
  std::string output;
  /// Set for ergodic, drift, minorization and asymptotic-periodicity.
  std::optional<OUSpec> ou;
  /// Set for qsd and survival.
  std::optional<BoundaryPair> boundary;

  ErgodicParams ergodic;
  DriftParams drift;
  MinorizationParams minorization;
  QsdParams qsd;
  SurvivalParams survival;
  PeriodicityParams periodicity;
};

/// Structural equality; time functions compare by canonical text and
/// declarations. Only the parameter block of the config's kind is compared.
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Parses a JSON config. Required: "kind". Optional: "seed", "threads",
/// "output", "model" (defaults to the built-in OU spec or boundary pair) and
/// "params". Unknown keys anywhere are rejected.
ExperimentConfig parse_config(std::string_view json_text);

/// Canonical JSON (pretty-printed, models always explicit).
std::string serialize_config(const ExperimentConfig& cfg);

/// Positivity and range checks on the parameters of the config's kind.
void validate_config(const ExperimentConfig& cfg);

/// Default artifact name for a kind, e.g. "report.csv" for ergodic.
std::string default_output(ExperimentKind kind);

}  // namespace apmarkov
