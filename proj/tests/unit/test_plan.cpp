#include <gtest/gtest.h>

#include "coe/errors.hpp"
#include "coe/plan.hpp"
#include "support.hpp"

namespace coe {
namespace {

std::string field_of(const std::string& text) {
  try {
    parse_plan(text, "/base");
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

const std::string kMinimal = "version = 1\nbackend = \"mock\"\nsamples = \"s.jsonl\"\n";

TEST(FlatConfig, ValuesSectionsAndComments) {
  auto cfg = parse_flat_config(R"(# comment
name = "a # not a comment"  # trailing
n = -3
x = 0.25
flag = true
list = ["a", "b"]
nums = [0, 0.5]
empty = []
[sec]
key = "v"
)");
  EXPECT_EQ(cfg.at("name"), "a # not a comment");
  EXPECT_EQ(cfg.at("n"), -3);
  EXPECT_DOUBLE_EQ(cfg.at("x").get<double>(), 0.25);
  EXPECT_EQ(cfg.at("flag"), true);
  EXPECT_EQ(cfg.at("list"), json::parse(R"(["a","b"])"));
  EXPECT_EQ(cfg.at("nums").size(), 2u);
  EXPECT_TRUE(cfg.at("empty").empty());
  EXPECT_EQ(cfg.at("sec.key"), "v");
}

TEST(FlatConfig, MalformedLinesNameTheLine) {
  for (const char* bad : {"x\n", "x = \"open\n", "[bad\n", "x = [1, \n", "x = 1\nx = 2\n", "x = what\n"}) {
    EXPECT_THROW(parse_flat_config(bad), ConfigError) << bad;
  }
  try {
    parse_flat_config("a = 1\nb\n");
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "line 2");
  }
}

TEST(Plan, DefaultsAndPathResolution) {
  auto p = parse_plan(kMinimal, "/base");
  EXPECT_EQ(p.samples, "/base/s.jsonl");
  EXPECT_EQ(p.backend, "mock");
  EXPECT_EQ(p.repeats, 3);
  EXPECT_EQ(p.ratios.size(), 4u);
  EXPECT_EQ(p.k, 5u);
  EXPECT_EQ(p.retrieve_limit, 10u);
  EXPECT_EQ(parse_plan(kMinimal + "mock_rules = \"/abs/r.json\"\n", "/base").mock_rules, "/abs/r.json");
}

TEST(Plan, SyntheticPlanLoads) {
  auto p = load_plan(testing::source_path("data/synthetic/plan.toml"));
  EXPECT_EQ(p.seed, 20250101u);
  EXPECT_EQ(p.experiments.size(), 4u);
  EXPECT_EQ(p.ratios[1], (Ratio{1, 4}));
  EXPECT_EQ(p.arms, (std::vector<std::string>{"naive", "scopecoe"}));
  EXPECT_EQ(p.mwu_unit, MwuUnit::sample);
}

TEST(Plan, ErrorsNameTheField) {
  EXPECT_EQ(field_of("version = 1\nsamples = \"s\"\n"), "backend");
  EXPECT_EQ(field_of("backend = \"mock\"\nsamples = \"s\"\n"), "version");
  EXPECT_EQ(field_of("version = 2\nbackend = \"m\"\nsamples = \"s\"\n"), "version");
  EXPECT_EQ(field_of(kMinimal + "ratios = [0, 1.0]\n"), "ratios");
  EXPECT_EQ(field_of(kMinimal + "repeats = 0\n"), "repeats");
  EXPECT_EQ(field_of(kMinimal + "repeats = \"3\"\n"), "repeats");
  EXPECT_EQ(field_of(kMinimal + "conditions = [\"RAG\"]\n"), "conditions");
  EXPECT_EQ(field_of(kMinimal + "experiments = [\"speed\"]\n"), "experiments");
  EXPECT_EQ(field_of(kMinimal + "[search]\nclient = \"bing\"\n"), "search.client");
  EXPECT_EQ(field_of(kMinimal + "[rag]\nk = 0\n"), "rag.k");
  EXPECT_EQ(field_of(kMinimal + "[rag]\narms = [\"rerank\"]\n"), "rag.arms");
  EXPECT_EQ(field_of(kMinimal + "mwu_unit = \"pair\"\n"), "mwu_unit");
  EXPECT_EQ(field_of(kMinimal + "colour = \"red\"\n"), "colour");
  EXPECT_EQ(field_of(kMinimal + "seed = -1\n"), "seed");
  try {
    load_plan("/nonexistent/plan.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "plan");
  }
}

TEST(Plan, CanonicalJsonIgnoresLayout) {
  auto a = parse_plan(kMinimal + "repeats = 2\n", "/base");
  auto b = parse_plan("# same plan\nrepeats = 2\n" + kMinimal, "/base");
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_NE(a.to_json(), parse_plan(kMinimal, "/base").to_json());
}

}  // namespace
}  // namespace coe
