#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coe/coverage.hpp"
#include "coe/evaluation.hpp"
#include "coe/gateway.hpp"
#include "coe/model.hpp"
#include "coe/noise.hpp"

namespace coe {

// Retrieved results (deduplicated by normalized text, ids web-000, ...) then
// the CoE split into sentences (coe-000, ...), in sentence order.
std::vector<KnowledgeSnippet> build_corpus(const QASample& sample,
                                           std::span<const SearchResult> retrieved);

// Digest over ids, provenances and texts; equal corpora give equal digests.
std::string corpus_digest(std::span<const KnowledgeSnippet> corpus);

class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;
  virtual std::string id() const = 0;
  // One score per snippet, higher is more relevant.
  virtual std::vector<double> score(std::string_view question,
                                    std::span<const KnowledgeSnippet> snippets) = 0;
};

// Share of the question's distinct content tokens that occur in the snippet.
class OverlapScorer : public RelevanceScorer {
 public:
  std::string id() const override { return "overlap"; }
  std::vector<double> score(std::string_view question,
                            std::span<const KnowledgeSnippet> snippets) override;
};

// The min(k, |corpus|) highest-scoring snippets, best first; ties go to the
// smaller id.
std::vector<KnowledgeSnippet> naive_rag_select(std::string_view question,
                                               std::span<const KnowledgeSnippet> corpus,
                                               std::size_t k, RelevanceScorer& scorer);

struct ScopeSelection {
  std::vector<KnowledgeSnippet> snippets;  // insertion order of the search
  std::vector<FeatureJudgment> judgments;  // one per corpus snippet
  CoverageReport report;
};

// Judges every corpus snippet against the features, then runs Minimal
// Coverage Search. No cap on the selection size.
ScopeSelection scopecoe_select(Gateway& judge, const QuestionFeatures& features,
                               std::span<const KnowledgeSnippet> corpus, int threads);

struct RagOptions {
  std::size_t k = 5;
  std::size_t retrieve_limit = 10;
  int repeats = 3;
  int threads = 1;
  bool run_naive = true;
  bool run_scopecoe = true;
};

struct RagSampleTrace {
  std::string sample_id;
  // Digest of the corpus each arm selected from; equal by construction.
  std::string naive_corpus_digest;
  std::string scopecoe_corpus_digest;
  std::size_t corpus_size = 0;
  std::vector<std::string> naive_ids;
  std::vector<std::string> scopecoe_ids;
  std::optional<CoverageReport> coverage;
  std::optional<std::string> error;
};

struct RagArm {
  Condition condition = Condition::rag;
  ConditionRun run;
  double mean_pieces = 0.0;
};

struct RagComparison {
  std::vector<RagArm> arms;
  std::vector<RagSampleTrace> traces;
};

// Both arms answer from contexts built over the same per-sample corpus
// (question searched once). A sample whose retrieval or judging fails keeps
// its slot: its trace and its trial records carry the error.
RagComparison run_rag_comparison(std::span<const QASample> samples, Gateway& answerer,
                                 Gateway& judge, SearchClient& search, RelevanceScorer& scorer,
                                 const RagOptions& options);

void to_json(json& j, const RagSampleTrace& t);

}  // namespace coe
