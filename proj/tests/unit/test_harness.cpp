#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "apmarkov/harness.hpp"
#include "frozen.hpp"

using namespace apmarkov;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("apmarkov_harness_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

RunResult run_text(const std::string& json, const fs::path& dir) {
  std::ostringstream diag;
  try {
    return run_experiment(parse_config(json), dir, diag);
  } catch (const ConfigError& e) {
    return {kExitValidation, {}, e.what()};
  }
}

}  // namespace

TEST(Harness, ConstantObservableHasNoError) {
  const auto dir = fresh_dir("const");
  const auto res = run_text(R"({"kind": "ergodic", "params": {"observable": "1", "t_values": [1, 2], "replicas": 8}})", dir);
  ASSERT_EQ(res.exit_code, kExitOk) << res.message;
  std::string header;
  const auto rows = read_csv(dir / "report.csv", &header);
  EXPECT_EQ(header, "t,mean_avg,l2_err,var,stderr");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r[1], 1.0, 1e-12);
    EXPECT_LE(r[2], 1e-24);
  }
}

TEST(Harness, NegativeStepIsAValidationFailure) {
  const auto dir = fresh_dir("neg");
  std::ostringstream diag;
  auto cfg = parse_config(R"({"kind": "ergodic"})");
  cfg.ergodic.dt = -0.01;
  const auto res = run_experiment(cfg, dir, diag);
  EXPECT_EQ(res.exit_code, kExitValidation);
  EXPECT_NE(diag.str().find("params.dt"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "manifest.jsonl"));
}

TEST(Harness, MissingConfigFileIsAValidationFailure) {
  std::ostringstream diag;
  RunRequest req;
  req.config_path = "/nonexistent/config.json";
  EXPECT_EQ(run(req, diag).exit_code, kExitValidation);
}

TEST(Harness, WrongKindForSubcommand) {
  const auto dir = fresh_dir("kind");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"kind": "qsd"})";
  RunRequest req;
  req.config_path = dir / "c.json";
  req.out_dir = dir;
  req.expect_kind = ExperimentKind::Ergodic;
  std::ostringstream diag;
  EXPECT_EQ(run(req, diag).exit_code, kExitValidation);
}

TEST(Harness, SameSeedGivesIdenticalBytes) {
  const std::string cfg =
      R"({"kind": "ergodic", "seed": 5, "params": {"t_values": [1, 4], "replicas": 50, "export_replicas": 3}})";
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ASSERT_EQ(run_text(cfg, a).exit_code, kExitOk);
  ASSERT_EQ(run_text(cfg, b).exit_code, kExitOk);
  for (const char* name : {"report.csv", "ensemble.csv", "ensemble.meta.jsonl"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  std::string header;
  const auto ens = read_csv(a / "ensemble.csv", &header);
  EXPECT_EQ(header, "replica,step,time,state");
  EXPECT_EQ(ens.size(), 3u * 401u);
}

TEST(Harness, ManifestRecordsHashSeedAndVersion) {
  const auto dir = fresh_dir("manifest");
  const std::string cfg = R"({"kind": "survival", "seed": 12, "params": {"k_list": [0, 1], "paths": 200, "t": 0.5}})";
  ASSERT_EQ(run_text(cfg, dir).exit_code, kExitOk);
  ASSERT_EQ(run_text(cfg, dir).exit_code, kExitOk);
  std::ifstream in(dir / "manifest.jsonl");
  std::string line;
  std::vector<nlohmann::json> recs;
  while (std::getline(in, line)) recs.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0]["seed"], 12);
  EXPECT_EQ(recs[0]["version"], std::string(version()));
  EXPECT_EQ(recs[0]["kind"], "survival");
  EXPECT_EQ(recs[0]["config_hash"], recs[1]["config_hash"]);
  EXPECT_EQ(recs[0]["config_hash"], fnv1a_hex(serialize_config(parse_config(cfg))));
  EXPECT_EQ(recs[0]["artifacts"][0], "survival.csv");
}

TEST(Harness, FnvMatchesReferenceVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Harness, DefaultErgodicMeanNearLimit) {
  const auto dir = fresh_dir("limit");
  const auto res = run_text(R"({"kind": "ergodic", "params": {"t_values": [50], "replicas": 200}})", dir);
  ASSERT_EQ(res.exit_code, kExitOk) << res.message;
  const auto rows = read_csv(dir / "report.csv");
  ASSERT_EQ(rows.size(), 1u);
  // Finite-horizon bias of the time average is about 0.01 at t = 50.
  EXPECT_NEAR(rows[0][1], frozen::kDefaultOuSquareLimit, 3 * rows[0][4] + 0.01);
}

TEST(Harness, EveryKindRuns) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"kind": "drift"})", "drift.jsonl"},
      {R"({"kind": "minorization", "params": {"samples": 50, "s_values": [0, 0.5]}})", "minorization.jsonl"},
      {R"({"kind": "qsd", "params": {"particles": 100, "T": 1, "dt": 0.005, "bins": 10}})", "occ.csv"},
      {R"({"kind": "survival", "params": {"paths": 100, "t": 0.5}})", "survival.csv"},
      {R"({"kind": "asymptotic-periodicity", "params": {"k_list": [0, 2]}})", "periodicity.csv"},
  };
  for (const auto& [json, artifact] : cases) {
    const auto dir = fresh_dir("kinds");
    const auto res = run_text(json, dir);
    ASSERT_EQ(res.exit_code, kExitOk) << json << ": " << res.message;
    EXPECT_TRUE(fs::exists(dir / artifact)) << artifact;
  }
  std::string header;
  const auto dir = fresh_dir("kinds_hdr");
  ASSERT_EQ(run_text(R"({"kind": "qsd", "params": {"particles": 50, "T": 0.5, "dt": 0.005, "bins": 10}})", dir).exit_code,
            kExitOk);
  const auto occ = read_csv(dir / "occ.csv", &header);
  EXPECT_EQ(header, "bin_center,mass");
  double total = 0.0;
  for (const auto& r : occ) total += r[1];
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Harness, NonFiniteResultIsANumericFailure) {
  const auto dir = fresh_dir("nan");
  const auto res = run_text(R"J({"kind": "ergodic", "params": {"observable": "exp(10000*x^2)", "t_values": [1], "replicas": 4}})J", dir);
  EXPECT_EQ(res.exit_code, kExitNumeric) << res.message;
}
