#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coe/model.hpp"

namespace coe {

// Minimal Coverage Search over a per-snippet judgment matrix.
//
//   1. every snippet whose intent flag is set, in index order;
//   2. for each relation not covered by the current selection, the first
//      snippet (ascending index) carrying it;
//   3. the same for keywords.
//
// Before a relation or keyword is sought, the current selection is checked
// again, so a snippet added earlier in the same phase can already cover it.
// Features no snippet carries are left uncovered. Returns indices in
// insertion order, without duplicates. Throws LengthMismatchError when the
// judgment vectors disagree in length.
std::vector<std::size_t> minimal_coverage_search(std::span<const FeatureJudgment> judgments);

// Snippet-level form; snippets and judgments are positionally aligned (ids
// must agree).
std::vector<KnowledgeSnippet> minimal_coverage_search(std::span<const KnowledgeSnippet> snippets,
                                                      std::span<const FeatureJudgment> judgments);

struct FeatureShape {
  std::size_t keywords = 0;
  std::size_t relations = 0;
};

// Shape shared by all judgments; `fallback` when the list is empty.
FeatureShape shape_of(std::span<const FeatureJudgment> judgments, FeatureShape fallback = {});

struct CoverageReport {
  std::size_t intent_snippet_count = 0;
  bool intent_covered = false;
  std::vector<std::size_t> covered_relations;
  std::vector<std::size_t> uncovered_relations;
  std::vector<std::size_t> covered_keywords;
  std::vector<std::size_t> uncovered_keywords;
  std::vector<std::string> selected_ids;

  // intent (0/1) + covered relations + covered keywords.
  std::size_t covered_count() const;
  bool operator==(const CoverageReport&) const = default;
};

// Throws UnknownIdError for an id with no judgment.
CoverageReport coverage_of(std::span<const std::string> selected_ids,
                           std::span<const FeatureJudgment> judgments, FeatureShape shape);

// Number of features (intent, relations, keywords) covered by a selection.
std::size_t coverage_count(std::span<const FeatureJudgment> judgments,
                           std::span<const std::size_t> selection);

struct MaxCoverage {
  std::size_t covered = 0;
  std::vector<std::size_t> witness;  // ascending indices
};

inline constexpr std::size_t kBruteForceLimit = 12;

// Exhaustive search: the largest coverable feature count and a smallest
// subset achieving it, ties broken by the lexicographically smallest index
// set. Throws SizeLimitError above kBruteForceLimit snippets.
MaxCoverage brute_force_max_coverage(std::span<const FeatureJudgment> judgments, int threads);
MaxCoverage brute_force_max_coverage_serial(std::span<const FeatureJudgment> judgments);

void to_json(json& j, const CoverageReport& r);
void from_json(const json& j, CoverageReport& r);

}  // namespace coe
