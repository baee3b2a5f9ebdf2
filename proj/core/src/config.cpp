#include "apmarkov/config.hpp"

#include <array>
#include <cmath>
#include <set>

#include "json.hpp"

namespace apmarkov {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 6> kKinds{{
    {ExperimentKind::Ergodic, "ergodic"},
    {ExperimentKind::Drift, "drift"},
    {ExperimentKind::Minorization, "minorization"},
    {ExperimentKind::Qsd, "qsd"},
    {ExperimentKind::Survival, "survival"},
    {ExperimentKind::AsymptoticPeriodicity, "asymptotic-periodicity"},
}};

bool uses_ou(ExperimentKind k) {
  return k == ExperimentKind::Ergodic || k == ExperimentKind::Drift || k == ExperimentKind::Minorization ||
         k == ExperimentKind::AsymptoticPeriodicity;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads the members of one JSON object, remembering which keys were used so
// that leftovers can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string field(const std::string& key) const { return join(path_, key); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    out = v.get<double>();
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (v.is_null()) {
      out.reset();
      return;
    }
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    out = v.get<double>();
  }
  template <typename U>
    requires std::is_unsigned_v<U>
  void count(const std::string& key, U& out) {
    if (!has(key)) return;
    out = as_count<U>(raw(key), field(key));
  }
  void flag(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    out = v.get<bool>();
  }
  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    out = v.get<std::string>();
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
  }
  void counts(const std::string& key, std::vector<std::size_t>& out) {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of non-negative integers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_count<std::size_t>(v[i], field(key) + "[" + std::to_string(i) + "]"));
    }
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  template <typename U>
  static U as_count(const json& v, const std::string& f) {
    if (v.is_number_unsigned()) {
      const auto x = v.get<std::uint64_t>();
      if (x > std::numeric_limits<U>::max()) throw ConfigError(f, "value out of range");
      return static_cast<U>(x);
    }
    if (v.is_number_integer()) throw ConfigError(f, "must be non-negative");
    throw ConfigError(f, "expected a non-negative integer");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

TimeFunction read_function(const json& v, const std::string& f) {
  try {
    if (v.is_string()) return TimeFunction::parse(v.get<std::string>());
    Reader r(v, f);
    std::string expr;
    if (!r.has("expr")) throw ConfigError(r.field("expr"), "missing");
    r.text("expr", expr);
    Declarations d;
    r.number("lower", d.lower);
    r.number("upper", d.upper);
    r.number("period", d.period);
    r.finish();
    return TimeFunction::parse(expr, d);
  } catch (const ParseError& e) {
    throw ConfigError(f, e.what());
  }
}

json write_function(const TimeFunction& fn) {
  json j;
  j["expr"] = fn.to_string();
  const auto& d = fn.declarations();
  if (std::isfinite(d.lower)) j["lower"] = d.lower;
  if (std::isfinite(d.upper)) j["upper"] = d.upper;
  if (d.period) j["period"] = *d.period;
  return j;
}

bool same_function(const TimeFunction& a, const TimeFunction& b) {
  return a.to_string() == b.to_string() && a.declarations() == b.declarations();
}

void require(Reader& r, const std::string& key) {
  if (!r.has(key)) throw ConfigError(r.field(key), "missing");
}

OUSpec read_ou(const json& v) {
  Reader r(v, "model");
  OUSpec spec;
  require(r, "lambda");
  require(r, "g");
  spec.lambda = read_function(r.raw("lambda"), r.field("lambda"));
  spec.g = read_function(r.raw("g"), r.field("g"));
  r.number("gamma", spec.gamma);
  r.finish();
  return spec;
}

BoundaryPair read_boundary(const json& v) {
  Reader r(v, "model");
  BoundaryPair pair;
  require(r, "h");
  require(r, "g");
  pair.h = read_function(r.raw("h"), r.field("h"));
  pair.g = read_function(r.raw("g"), r.field("g"));
  r.number("gamma", pair.gamma);
  r.count("n0", pair.n0);
  r.finish();
  return pair;
}

void read_params(Reader& r, ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::Ergodic: {
      auto& p = c.ergodic;
      r.text("observable", p.observable);
      r.number("x0", p.x0);
      r.number("dt", p.dt);
      r.numbers("t_values", p.t_values);
      r.count("replicas", p.replicas);
      r.flag("auxiliary", p.auxiliary);
      r.number("limit", p.limit);
      r.count("export_replicas", p.export_replicas);
      break;
    }
    case ExperimentKind::Drift: {
      auto& p = c.drift;
      r.text("psi", p.psi);
      r.number("theta", p.theta);
      r.number("C", p.C);
      r.number("k_edge", p.k_edge);
      r.number("s", p.s);
      r.number("t1", p.t1);
      r.numbers("growth_t", p.growth_t);
      r.number("mesh_lo", p.mesh_lo);
      r.number("mesh_hi", p.mesh_hi);
      r.count("mesh_points", p.mesh_points);
      break;
    }
    case ExperimentKind::Minorization: {
      auto& p = c.minorization;
      r.number("k_edge", p.k_edge);
      r.number("t1", p.t1);
      r.count("n0", p.n0);
      r.numbers("s_values", p.s_values);
      r.numbers("probes", p.probes);
      r.count("samples", p.samples);
      r.count("mesh_points", p.mesh_points);
      r.number("mesh_lo", p.mesh_lo);
      r.number("mesh_hi", p.mesh_hi);
      break;
    }
    case ExperimentKind::Qsd: {
      auto& p = c.qsd;
      r.count("particles", p.particles);
      r.number("dt", p.dt);
      r.number("T", p.T);
      r.count("bins", p.bins);
      r.number("burn_in", p.burn_in);
      r.number("x0", p.x0);
      r.flag("bridge", p.bridge);
      r.text("measure", p.measure);
      break;
    }
    case ExperimentKind::Survival: {
      auto& p = c.survival;
      r.number("s", p.s);
      r.number("t", p.t);
      r.number("x", p.x);
      r.counts("k_list", p.k_list);
      r.count("paths", p.paths);
      r.number("dt", p.dt);
      r.flag("bridge", p.bridge);
      break;
    }
    case ExperimentKind::AsymptoticPeriodicity: {
      auto& p = c.periodicity;
      r.number("s", p.s);
      r.count("n", p.n);
      r.counts("k_list", p.k_list);
      r.numbers("probes", p.probes);
      break;
    }
  }
}

json write_params(const ExperimentConfig& c) {
  json j;
  switch (c.kind) {
    case ExperimentKind::Ergodic: {
      const auto& p = c.ergodic;
      j = {{"observable", p.observable}, {"x0", p.x0},         {"dt", p.dt},
           {"t_values", p.t_values},     {"replicas", p.replicas}, {"auxiliary", p.auxiliary},
           {"export_replicas", p.export_replicas}};
      if (p.limit) j["limit"] = *p.limit;
      break;
    }
    case ExperimentKind::Drift: {
      const auto& p = c.drift;
      j = {{"psi", p.psi},         {"theta", p.theta},     {"C", p.C},
           {"k_edge", p.k_edge},   {"s", p.s},             {"t1", p.t1},
           {"growth_t", p.growth_t}, {"mesh_lo", p.mesh_lo}, {"mesh_hi", p.mesh_hi},
           {"mesh_points", p.mesh_points}};
      break;
    }
    case ExperimentKind::Minorization: {
      const auto& p = c.minorization;
      j = {{"k_edge", p.k_edge},   {"t1", p.t1},           {"n0", p.n0},
           {"s_values", p.s_values}, {"probes", p.probes},   {"samples", p.samples},
           {"mesh_points", p.mesh_points}, {"mesh_lo", p.mesh_lo}, {"mesh_hi", p.mesh_hi}};
      break;
    }
    case ExperimentKind::Qsd: {
      const auto& p = c.qsd;
      j = {{"particles", p.particles}, {"dt", p.dt}, {"T", p.T},         {"bins", p.bins},
           {"burn_in", p.burn_in},     {"x0", p.x0}, {"bridge", p.bridge}, {"measure", p.measure}};
      break;
    }
    case ExperimentKind::Survival: {
      const auto& p = c.survival;
      j = {{"s", p.s},         {"t", p.t},   {"x", p.x},          {"k_list", p.k_list},
           {"paths", p.paths}, {"dt", p.dt}, {"bridge", p.bridge}};
      break;
    }
    case ExperimentKind::AsymptoticPeriodicity: {
      const auto& p = c.periodicity;
      j = {{"s", p.s}, {"n", p.n}, {"k_list", p.k_list}, {"probes", p.probes}};
      break;
    }
  }
  return j;
}

void positive(double v, const char* f) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(f, "must be positive");
}
void non_negative(double v, const char* f) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(f, "must be non-negative");
}
void finite(double v, const char* f) {
  if (!std::isfinite(v)) throw ConfigError(f, "must be finite");
}
void at_least(std::size_t v, std::size_t lo, const char* f) {
  if (v < lo) throw ConfigError(f, "must be at least " + std::to_string(lo));
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  throw ConfigError("kind", "unknown experiment kind '" + std::string(name) +
                                "' (expected ergodic, drift, minorization, qsd, survival or asymptotic-periodicity)");
}

std::string default_output(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Ergodic: return "report.csv";
    case ExperimentKind::Drift: return "drift.jsonl";
    case ExperimentKind::Minorization: return "minorization.jsonl";
    case ExperimentKind::Qsd: return "occ.csv";
    case ExperimentKind::Survival: return "survival.csv";
    case ExperimentKind::AsymptoticPeriodicity: return "periodicity.csv";
  }
  return "out.csv";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.kind != b.kind || a.seed != b.seed || a.threads != b.threads || a.output != b.output) return false;
  if (a.ou.has_value() != b.ou.has_value() || a.boundary.has_value() != b.boundary.has_value()) return false;
  if (a.ou) {
    if (!same_function(a.ou->lambda, b.ou->lambda) || !same_function(a.ou->g, b.ou->g) ||
        a.ou->gamma != b.ou->gamma) {
      return false;
    }
  }
  if (a.boundary) {
    if (!same_function(a.boundary->h, b.boundary->h) || !same_function(a.boundary->g, b.boundary->g) ||
        a.boundary->gamma != b.boundary->gamma || a.boundary->n0 != b.boundary->n0) {
      return false;
    }
  }
  switch (a.kind) {
    case ExperimentKind::Ergodic: return a.ergodic == b.ergodic;
    case ExperimentKind::Drift: return a.drift == b.drift;
    case ExperimentKind::Minorization: return a.minorization == b.minorization;
    case ExperimentKind::Qsd: return a.qsd == b.qsd;
    case ExperimentKind::Survival: return a.survival == b.survival;
    case ExperimentKind::AsymptoticPeriodicity: return a.periodicity == b.periodicity;
  }
  return false;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  Reader r(doc, "");
  ExperimentConfig c;
  require(r, "kind");
  std::string kind;
  r.text("kind", kind);
  c.kind = parse_kind(kind);
  r.count("seed", c.seed);
  r.count("threads", c.threads);
  r.text("output", c.output);
  if (uses_ou(c.kind)) {
    c.ou = r.has("model") ? read_ou(r.raw("model")) : default_ou_spec();
  } else {
    c.boundary = r.has("model") ? read_boundary(r.raw("model")) : default_boundary_pair();
  }
  if (r.has("params")) {
    Reader p(r.raw("params"), "params");
    read_params(p, c);
    p.finish();
  }
  r.finish();
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  if (!c.output.empty()) j["output"] = c.output;
  if (c.ou) {
    j["model"] = {{"lambda", write_function(c.ou->lambda)}, {"g", write_function(c.ou->g)}, {"gamma", c.ou->gamma}};
  }
  if (c.boundary) {
    j["model"] = {{"h", write_function(c.boundary->h)},
                  {"g", write_function(c.boundary->g)},
                  {"gamma", c.boundary->gamma},
                  {"n0", c.boundary->n0}};
  }
  j["params"] = write_params(c);
  return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
  at_least(c.threads, 1, "threads");
  if (c.output.find('/') != std::string::npos) throw ConfigError("output", "must be a file name, not a path");
  if (c.ou) positive(c.ou->gamma, "model.gamma");
  if (c.boundary) {
    positive(c.boundary->gamma, "model.gamma");
    at_least(c.boundary->n0, 1, "model.n0");
  }
  switch (c.kind) {
    case ExperimentKind::Ergodic: {
      const auto& p = c.ergodic;
      positive(p.dt, "params.dt");
      finite(p.x0, "params.x0");
      at_least(p.replicas, 2, "params.replicas");
      if (p.t_values.empty()) throw ConfigError("params.t_values", "must not be empty");
      for (std::size_t i = 0; i < p.t_values.size(); ++i) {
        positive(p.t_values[i], "params.t_values");
        if (i > 0 && !(p.t_values[i] > p.t_values[i - 1])) {
          throw ConfigError("params.t_values", "must be increasing");
        }
      }
      break;
    }
    case ExperimentKind::Drift: {
      const auto& p = c.drift;
      positive(p.theta, "params.theta");
      non_negative(p.C, "params.C");
      non_negative(p.k_edge, "params.k_edge");
      non_negative(p.s, "params.s");
      positive(p.t1, "params.t1");
      for (double t : p.growth_t) positive(t, "params.growth_t");
      if (!(p.mesh_hi > p.mesh_lo)) throw ConfigError("params.mesh_hi", "must exceed mesh_lo");
      at_least(p.mesh_points, 2, "params.mesh_points");
      break;
    }
    case ExperimentKind::Minorization: {
      const auto& p = c.minorization;
      non_negative(p.k_edge, "params.k_edge");
      positive(p.t1, "params.t1");
      at_least(p.n0, 1, "params.n0");
      if (p.s_values.empty()) throw ConfigError("params.s_values", "must not be empty");
      for (double s : p.s_values) non_negative(s, "params.s_values");
      at_least(p.samples, 4, "params.samples");
      at_least(p.mesh_points, 2, "params.mesh_points");
      if (!(p.mesh_hi > p.mesh_lo)) throw ConfigError("params.mesh_hi", "must exceed mesh_lo");
      break;
    }
    case ExperimentKind::Qsd: {
      const auto& p = c.qsd;
      at_least(p.particles, 2, "params.particles");
      positive(p.dt, "params.dt");
      positive(p.T, "params.T");
      at_least(p.bins, 1, "params.bins");
      non_negative(p.burn_in, "params.burn_in");
      if (!(p.burn_in < p.T)) throw ConfigError("params.burn_in", "must be smaller than T");
      finite(p.x0, "params.x0");
      if (p.measure != "lineage" && p.measure != "forward") {
        throw ConfigError("params.measure", "must be \"lineage\" or \"forward\"");
      }
      break;
    }
    case ExperimentKind::Survival: {
      const auto& p = c.survival;
      non_negative(p.s, "params.s");
      non_negative(p.t, "params.t");
      if (!(p.s <= p.t)) throw ConfigError("params.t", "must be at least s");
      finite(p.x, "params.x");
      if (p.k_list.empty()) throw ConfigError("params.k_list", "must not be empty");
      at_least(p.paths, 2, "params.paths");
      positive(p.dt, "params.dt");
      break;
    }
    case ExperimentKind::AsymptoticPeriodicity: {
      const auto& p = c.periodicity;
      non_negative(p.s, "params.s");
      at_least(p.n, 1, "params.n");
      if (p.k_list.empty()) throw ConfigError("params.k_list", "must not be empty");
      if (p.probes.empty()) throw ConfigError("params.probes", "must not be empty");
      break;
    }
  }
}

}  // namespace apmarkov
