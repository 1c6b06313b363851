#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coe/model.hpp"
#include "coe/report.hpp"

namespace coe {

// Flat key = value config: strings in double quotes, integers, decimals,
// true/false, and one-line arrays of those. "[section]" headers prefix the
// following keys with "section.". "#" starts a comment outside strings.
// Throws ConfigError naming the line on malformed input.
std::map<std::string, json> parse_flat_config(std::string_view text);

inline constexpr int kPlanVersion = 1;

struct RunPlan {
  int version = kPlanVersion;
  std::string samples;  // path
  std::string backend;  // "mock" or a provider id
  std::string mock_rules;  // path, mock backend only
  std::vector<std::string> answer_models{"mock-reader"};
  std::string judge_model = "mock-judge";
  std::string noise_fixtures;  // search fixtures for background queries
  std::string rag_fixtures;    // search fixtures keyed by question
  std::string search = "fixture";  // "fixture" or "google"
  std::vector<std::string> experiments{"effectiveness", "faithfulness", "robustness"};
  std::vector<Condition> conditions{Condition::coe, Condition::senp, Condition::wordp};
  std::vector<Ratio> ratios{{0, 1}, {1, 4}, {1, 2}, {3, 4}};
  int repeats = 3;
  std::uint64_t seed = 0;
  int parallelism = 8;
  std::size_t per_query_limit = 10;
  std::size_t misinformation_count = 12;
  std::string cache_dir;  // empty: <out>/cache
  MwuUnit mwu_unit = MwuUnit::sample;
  std::size_t k = 5;
  std::size_t retrieve_limit = 10;
  std::vector<std::string> arms{"naive", "scopecoe"};
  std::string scorer = "overlap";

  // Canonical form used for the manifest digest.
  json to_json() const;
};

inline const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> k{"effectiveness", "faithfulness", "robustness", "rag"};
  return k;
}

// Parses and validates a plan. Relative paths are resolved against
// `base_dir`. Throws ConfigError with the offending field.
RunPlan parse_plan(std::string_view text, const std::string& base_dir);
RunPlan load_plan(const std::string& path);

}  // namespace coe
