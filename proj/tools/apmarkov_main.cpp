// apmarkov: command-line front end for the experiment harness.
//
//   apmarkov run --config PATH --out DIR [--seed N] [--threads N]
//   apmarkov ergodic --config PATH --out report.csv
//   apmarkov qsd --config PATH --out occ.csv
//   apmarkov survival [--config PATH] --k-list 0,5,10,20 --out gaps.csv
//   apmarkov config --config PATH        (prints the canonical form)

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "apmarkov/config.hpp"
#include "apmarkov/harness.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Common& c, bool out_is_file, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "JSON experiment config");
  if (config_required) {
    opt->required()->check(CLI::ExistingFile);
  } else {
    opt->check(CLI::ExistingFile);
  }
  sub->add_option("--out", c.out, out_is_file ? "output CSV file" : "output directory")->required();
  sub->add_option("--seed", c.seed, "override the config seed");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

apmarkov::RunRequest request(const Common& c, bool out_is_file) {
  apmarkov::RunRequest req;
  req.config_path = c.config;
  req.seed = c.seed;
  req.threads = c.threads;
  if (out_is_file) {
    const std::filesystem::path p(c.out);
    req.out_dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    req.output = p.filename().string();
  } else {
    req.out_dir = c.out;
  }
  return req;
}

int report(const apmarkov::RunResult& r) {
  if (r.exit_code == apmarkov::kExitOk) {
    for (const auto& a : r.artifacts) std::cout << a.string() << '\n';
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotically periodic Markov process experiments"};
  app.set_version_flag("--version", std::string(apmarkov::version()));
  app.require_subcommand(1);

  Common run_opts, erg_opts, qsd_opts, surv_opts;
  std::vector<std::size_t> k_list;
  std::string config_only;

  auto* run = app.add_subcommand("run", "run any experiment config");
  add_common(run, run_opts, false, true);
  auto* erg = app.add_subcommand("ergodic", "ergodic-average report: t,mean_avg,l2_err,var,stderr");
  add_common(erg, erg_opts, true, true);
  auto* qsd = app.add_subcommand("qsd", "quasi-ergodic occupation: bin_center,mass");
  add_common(qsd, qsd_opts, true, true);
  auto* surv = app.add_subcommand("survival", "boundary survival gaps: k,gap,stderr,sandwich_prob");
  add_common(surv, surv_opts, true, false);
  surv->add_option("--k-list", k_list, "periods k")->delimiter(',');
  auto* cfg = app.add_subcommand("config", "parse, validate and print a config in canonical form");
  cfg->add_option("--config", config_only, "JSON experiment config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : apmarkov::kExitValidation;
  }

  if (run->parsed()) return report(apmarkov::run(request(run_opts, false), std::cerr));
  if (erg->parsed()) {
    auto req = request(erg_opts, true);
    req.expect_kind = apmarkov::ExperimentKind::Ergodic;
    return report(apmarkov::run(req, std::cerr));
  }
  if (qsd->parsed()) {
    auto req = request(qsd_opts, true);
    req.expect_kind = apmarkov::ExperimentKind::Qsd;
    return report(apmarkov::run(req, std::cerr));
  }
  if (surv->parsed()) {
    auto req = request(surv_opts, true);
    req.expect_kind = apmarkov::ExperimentKind::Survival;
    if (!k_list.empty()) req.k_list = k_list;
    return report(apmarkov::run(req, std::cerr));
  }
  if (cfg->parsed()) {
    std::ifstream in(config_only, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    try {
      const auto c = apmarkov::parse_config(text.str());
      apmarkov::validate_config(c);
      std::cout << apmarkov::serialize_config(c);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: invalid config: " << e.what() << '\n';
      return apmarkov::kExitValidation;
    }
  }
  return 0;
}
