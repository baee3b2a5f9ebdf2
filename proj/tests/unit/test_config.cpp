#include <gtest/gtest.h>

#include "apmarkov/config.hpp"

using namespace apmarkov;

namespace {

std::string field_of(const std::string& json) {
  try {
    validate_config(parse_config(json));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalConfigTakesDefaults) {
  const auto c = parse_config(R"({"kind": "ergodic"})");
  EXPECT_EQ(c.kind, ExperimentKind::Ergodic);
  EXPECT_EQ(c.seed, 1u);
  ASSERT_TRUE(c.ou.has_value());
  EXPECT_FALSE(c.boundary.has_value());
  EXPECT_EQ(c.ergodic, ErgodicParams{});
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_TRUE(parse_config(R"({"kind": "qsd"})").boundary.has_value());
}

TEST(Config, RoundTripsEveryKind) {
  for (const char* kind : {"ergodic", "drift", "minorization", "qsd", "survival", "asymptotic-periodicity"}) {
    const auto c = parse_config(std::string(R"({"kind": ")") + kind + R"(", "seed": 17})");
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    EXPECT_TRUE(back == c) << kind;
    EXPECT_EQ(serialize_config(back), text) << kind;
  }
}

TEST(Config, RoundTripKeepsExplicitModelAndParams) {
  const auto c = parse_config(R"J({
    "kind": "survival", "seed": 9, "output": "s.csv",
    "model": {"h": {"expr": "0.9", "lower": 0.9, "upper": 0.9}, "g": "1 + 0.1*sin(2*pi*t)", "gamma": 1, "n0": 2},
    "params": {"k_list": [0, 3], "paths": 50, "bridge": false}
  })J");
  EXPECT_EQ(c.boundary->n0, 2u);
  EXPECT_EQ(c.boundary->h.declarations().lower, 0.9);
  EXPECT_FALSE(c.survival.bridge);
  EXPECT_EQ(c.survival.k_list, (std::vector<std::size_t>{0, 3}));
  EXPECT_TRUE(parse_config(serialize_config(c)) == c);
}

TEST(Config, ChangedFieldBreaksEquality) {
  const auto a = parse_config(R"({"kind": "qsd"})");
  auto b = a;
  b.qsd.bins = 7;
  EXPECT_FALSE(a == b);
  b = a;
  b.ergodic.dt = 5.0;  // not the active kind
  EXPECT_TRUE(a == b);
}

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "sed": 3})"), "sed");
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "params": {"tvalues": [1]}})"), "params.tvalues");
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "model": {"lambda": "1", "g": "1", "beta": 1}})"), "model.beta");
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "model": {"lambda": {"expr": "1", "upper": 1, "lower": 1, "x": 0}, "g": "1"}})"),
            "model.lambda.x");
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "params": {"dt": -0.01}})"), "params.dt");
  EXPECT_EQ(field_of(R"({"kind": "qsd", "params": {"measure": "both"}})"), "params.measure");
  EXPECT_EQ(field_of(R"({"kind": "qsd", "params": {"particles": -5}})"), "params.particles");
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "threads": 0})"), "threads");
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "output": "a/b.csv"})"), "output");
  EXPECT_EQ(field_of(R"({"kind": "ergodic", "params": {"replicas": "many"}})"), "params.replicas");
  EXPECT_EQ(field_of(R"({"kind": "fourier"})"), "kind");
  EXPECT_EQ(field_of(R"({"seed": 1})"), "kind");
  EXPECT_EQ(field_of(R"({"kind": "drift", "model": {"lambda": "1"}})"), "model.g");
  EXPECT_EQ(field_of("{\"kind\": "), "<root>");
  try {
    validate_config(parse_config(R"({"kind": "ergodic", "params": {"dt": -0.01}})"));
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("must be positive"), std::string::npos);
  }
}

TEST(Config, BadExpressionIsAValidationError) {
  EXPECT_THROW(parse_config(R"J({"kind": "drift", "model": {"lambda": "1 + sin(2*pi*t", "g": "1"}})J"),
               std::invalid_argument);
}

TEST(Config, DefaultOutputs) {
  EXPECT_EQ(default_output(ExperimentKind::Ergodic), "report.csv");
  EXPECT_EQ(default_output(ExperimentKind::Qsd), "occ.csv");
  EXPECT_EQ(default_output(ExperimentKind::Survival), "survival.csv");
  EXPECT_EQ(default_output(ExperimentKind::AsymptoticPeriodicity), "periodicity.csv");
  for (auto k : {ExperimentKind::Ergodic, ExperimentKind::Drift, ExperimentKind::Minorization, ExperimentKind::Qsd,
                 ExperimentKind::Survival, ExperimentKind::AsymptoticPeriodicity}) {
    EXPECT_EQ(parse_kind(to_string(k)), k);
  }
}
