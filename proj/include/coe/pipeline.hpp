#pragma once

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "coe/gateway.hpp"
#include "coe/mock_backend.hpp"
#include "coe/model.hpp"
#include "coe/noise.hpp"
#include "coe/plan.hpp"
#include "coe/rag.hpp"
#include "coe/report.hpp"

namespace coe {

// "mock" builds a MockBackend from the rules file (optional) plus rules
// derived from the samples; "openai" reads credentials from the environment.
std::shared_ptr<Backend> make_backend(const std::string& backend_id, const std::string& mock_rules_path,
                                      std::span<const QASample> samples);

// "fixture" replays `fixtures`; "google" searches live and records into
// `fixtures` when it is set.
std::shared_ptr<SearchClient> make_search_client(const std::string& kind, const std::string& fixtures);

std::shared_ptr<RelevanceScorer> make_scorer(const std::string& kind);

bool is_mixed_experiment(const std::string& experiment);

// The text split into sentences as coe_piece snippets with ids
// "<condition>-000", "<condition>-001", ...
std::vector<KnowledgeSnippet> sentence_snippets(const std::string& text, Condition c);

// CoE against each perturbation for the mixed experiments, naive RAG against
// ScopeCoE for "rag". Only pairs whose conditions are both present.
std::vector<SignificancePair> significance_pairs(const std::string& experiment,
                                                std::span<const Condition> conditions);

// Stage names for derive_seed.
namespace stages {
inline constexpr std::string_view kWordp = "wordp";
inline constexpr std::string_view kMisinformation = "misinformation";
inline constexpr std::string_view kMix = "mix";
}  // namespace stages

struct PreparedSample {
  QASample sample;
  std::string id;
  bool is_coe = false;
  std::vector<std::string> missing_features;  // when not a CoE
  std::map<Condition, std::string> texts;
  std::map<Condition, std::string> text_errors;
  std::vector<KnowledgeSnippet> noise_pool;
  std::optional<std::string> noise_error;
  std::optional<std::string> incorrect_answer;
  std::optional<std::string> incorrect_error;
  std::vector<KnowledgeSnippet> misinformation;
  std::optional<std::string> misinformation_error;
  std::optional<std::string> error;  // judging the CoE itself failed

  bool usable() const { return is_coe && !error; }
};

struct PrepareNeeds {
  bool perturbations = true;  // fill in missing SenP / WordP
  bool noise = false;
  bool incorrect = false;
  bool misinformation = false;
  // Misinformation is generated until its mass supports this ratio for the
  // CoE text (capped at 8x the requested count).
  Ratio max_ratio{3, 4};
};

// Checks the CoE, fills in SenP/WordP when absent and gathers whatever noise
// the experiments need. Never throws for per-sample failures; they are
// recorded on the sample.
std::vector<PreparedSample> prepare_samples(std::span<const QASample> samples, Gateway& judge,
                                            SearchClient* noise_search, const PrepareNeeds& needs,
                                            std::uint64_t seed, std::size_t per_query_limit,
                                            std::size_t misinformation_count, int threads);

// Context for one sample under one experiment, condition and ratio.
struct BuiltContext {
  std::optional<MixedContext> mixed;
  std::string reference;
  std::optional<std::string> error;
};
BuiltContext build_context(const PreparedSample& p, const std::string& experiment, Condition c,
                           Ratio ratio, std::uint64_t seed);

struct RunOptions {
  std::string out_dir;
  std::ostream* log = nullptr;
};

struct RunOutcome {
  int exit_code = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t failed_records = 0;
  std::map<std::string, ExperimentReport> reports;
  std::string manifest_path;
  std::string manifest_digest;
};

// Runs every experiment of the plan and writes, under out_dir:
//   manifest.json, samples.prepared.jsonl, prepare.jsonl,
//   results/<experiment>/{records.jsonl, contexts.jsonl, summary.json, report.md}
// Exit code 0 when every trial ran, 1 when some were recorded as failures.
RunOutcome run_plan(const RunPlan& plan, const RunOptions& options);

// Digest over everything that determines results: tool version, plan
// parameters other than paths, template digests and input digests.
std::string manifest_digest(const json& manifest);

// One records.jsonl line per trial and back. Lines are grouped into reports by
// (model, condition, ratio, repeat) in first-seen order.
std::vector<json> records_to_lines(const std::string& experiment, std::span<const TrialReport> reports);
std::vector<TrialReport> reports_from_lines(std::span<const json> lines);

// Digest of a file, or of a directory as sorted (name, file digest) pairs.
std::string path_digest(const std::string& path);

}  // namespace coe
