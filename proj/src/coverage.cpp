#include "coe/coverage.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include <omp.h>

#include "coe/errors.hpp"

namespace coe {
namespace {

void check_shape(std::span<const FeatureJudgment> judgments) {
  if (judgments.empty()) return;
  const auto& first = judgments.front();
  for (const auto& j : judgments) {
    if (j.keyword_covered.size() != first.keyword_covered.size() ||
        j.relation_covered.size() != first.relation_covered.size()) {
      throw LengthMismatchError("judgment " + j.snippet_id + " has a different feature shape than " +
                                first.snippet_id);
    }
  }
}

// Feature bitmask of one judgment: bit 0 intent, then relations, then keywords.
std::uint64_t feature_mask(const FeatureJudgment& j) {
  std::uint64_t m = j.intent_covered ? 1u : 0u;
  std::size_t bit = 1;
  for (bool r : j.relation_covered) {
    if (r) m |= std::uint64_t{1} << bit;
    ++bit;
  }
  for (bool k : j.keyword_covered) {
    if (k) m |= std::uint64_t{1} << bit;
    ++bit;
  }
  return m;
}

std::vector<std::uint64_t> feature_masks(std::span<const FeatureJudgment> judgments) {
  check_shape(judgments);
  if (judgments.size() > kBruteForceLimit) {
    throw SizeLimitError("brute-force coverage is limited to " + std::to_string(kBruteForceLimit) +
                         " snippets, got " + std::to_string(judgments.size()));
  }
  if (!judgments.empty() &&
      1 + judgments[0].keyword_covered.size() + judgments[0].relation_covered.size() > 64) {
    throw SizeLimitError("brute-force coverage supports at most 64 features");
  }
  std::vector<std::uint64_t> masks;
  for (const auto& j : judgments) masks.push_back(feature_mask(j));
  return masks;
}

struct Candidate {
  int covered = -1;
  int size = 0;
  std::uint32_t subset = 0;
};

// Lexicographic order of the ascending index lists of two subsets.
bool lex_less(std::uint32_t a, std::uint32_t b) {
  while (a && b) {
    int ia = std::countr_zero(a);
    int ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

bool better(const Candidate& x, const Candidate& y) {
  if (x.covered != y.covered) return x.covered > y.covered;
  if (x.size != y.size) return x.size < y.size;
  return lex_less(x.subset, y.subset);
}

Candidate evaluate(const std::vector<std::uint64_t>& masks, std::uint32_t subset) {
  std::uint64_t covered = 0;
  for (std::uint32_t s = subset; s; s &= s - 1) covered |= masks[std::countr_zero(s)];
  return Candidate{std::popcount(covered), std::popcount(subset), subset};
}

MaxCoverage to_result(const Candidate& c) {
  MaxCoverage out;
  out.covered = static_cast<std::size_t>(c.covered);
  for (std::uint32_t s = c.subset; s; s &= s - 1) {
    out.witness.push_back(static_cast<std::size_t>(std::countr_zero(s)));
  }
  return out;
}

}  // namespace

std::vector<std::size_t> minimal_coverage_search(std::span<const FeatureJudgment> judgments) {
  check_shape(judgments);
  std::vector<std::size_t> selected;
  std::vector<char> in_set(judgments.size(), 0);
  auto add = [&](std::size_t i) {
    if (!in_set[i]) {
      in_set[i] = 1;
      selected.push_back(i);
    }
  };
  if (judgments.empty()) return selected;
  const std::size_t num_relations = judgments[0].relation_covered.size();
  const std::size_t num_keywords = judgments[0].keyword_covered.size();

  // Phase 1: intent.
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    if (judgments[i].intent_covered) add(i);
  }

  auto covered_by_selection = [&](auto flags_of, std::size_t feature) {
    return std::any_of(selected.begin(), selected.end(),
                       [&](std::size_t i) { return flags_of(judgments[i])[feature]; });
  };
  auto cover_phase = [&](auto flags_of, std::size_t count) {
    std::vector<std::size_t> uncovered;
    for (std::size_t f = 0; f < count; ++f) {
      if (!covered_by_selection(flags_of, f)) uncovered.push_back(f);
    }
    for (std::size_t f : uncovered) {
      if (covered_by_selection(flags_of, f)) continue;
      for (std::size_t i = 0; i < judgments.size(); ++i) {
        if (flags_of(judgments[i])[f]) {
          add(i);
          break;
        }
      }
    }
  };

  // Phase 2: relations, then phase 3: keywords.
  cover_phase([](const FeatureJudgment& j) -> const std::vector<bool>& { return j.relation_covered; },
              num_relations);
  cover_phase([](const FeatureJudgment& j) -> const std::vector<bool>& { return j.keyword_covered; },
              num_keywords);
  return selected;
}

std::vector<KnowledgeSnippet> minimal_coverage_search(std::span<const KnowledgeSnippet> snippets,
                                                      std::span<const FeatureJudgment> judgments) {
  if (snippets.size() != judgments.size()) {
    throw LengthMismatchError("got " + std::to_string(snippets.size()) + " snippets but " +
                              std::to_string(judgments.size()) + " judgments");
  }
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    if (snippets[i].id() != judgments[i].snippet_id) {
      throw LengthMismatchError("snippet " + snippets[i].id() + " is aligned with judgment for " +
                                judgments[i].snippet_id);
    }
  }
  std::vector<KnowledgeSnippet> out;
  for (std::size_t i : minimal_coverage_search(judgments)) out.push_back(snippets[i]);
  return out;
}

FeatureShape shape_of(std::span<const FeatureJudgment> judgments, FeatureShape fallback) {
  check_shape(judgments);
  if (judgments.empty()) return fallback;
  return FeatureShape{judgments[0].keyword_covered.size(), judgments[0].relation_covered.size()};
}

std::size_t CoverageReport::covered_count() const {
  return (intent_covered ? 1 : 0) + covered_relations.size() + covered_keywords.size();
}

CoverageReport coverage_of(std::span<const std::string> selected_ids,
                           std::span<const FeatureJudgment> judgments, FeatureShape shape) {
  check_shape(judgments);
  if (!judgments.empty() && (judgments[0].keyword_covered.size() != shape.keywords ||
                             judgments[0].relation_covered.size() != shape.relations)) {
    throw LengthMismatchError("feature counts do not match the judgments");
  }
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < judgments.size(); ++i) index.emplace(judgments[i].snippet_id, i);

  CoverageReport r;
  std::vector<char> rel(shape.relations, 0), kw(shape.keywords, 0);
  for (const auto& id : selected_ids) {
    auto it = index.find(id);
    if (it == index.end()) throw UnknownIdError("no judgment for snippet id " + id);
    if (std::find(r.selected_ids.begin(), r.selected_ids.end(), id) != r.selected_ids.end()) continue;
    r.selected_ids.push_back(id);
    const FeatureJudgment& j = judgments[it->second];
    if (j.intent_covered) {
      ++r.intent_snippet_count;
      r.intent_covered = true;
    }
    for (std::size_t f = 0; f < shape.relations; ++f) rel[f] |= j.relation_covered[f] ? 1 : 0;
    for (std::size_t f = 0; f < shape.keywords; ++f) kw[f] |= j.keyword_covered[f] ? 1 : 0;
  }
  for (std::size_t f = 0; f < shape.relations; ++f) {
    (rel[f] ? r.covered_relations : r.uncovered_relations).push_back(f);
  }
  for (std::size_t f = 0; f < shape.keywords; ++f) {
    (kw[f] ? r.covered_keywords : r.uncovered_keywords).push_back(f);
  }
  return r;
}

std::size_t coverage_count(std::span<const FeatureJudgment> judgments,
                           std::span<const std::size_t> selection) {
  check_shape(judgments);
  if (judgments.empty()) return 0;
  const FeatureJudgment& first = judgments[0];
  bool intent = false;
  std::vector<char> rel(first.relation_covered.size(), 0), kw(first.keyword_covered.size(), 0);
  for (std::size_t i : selection) {
    if (i >= judgments.size()) throw UnknownIdError("selection index out of range");
    const auto& j = judgments[i];
    intent = intent || j.intent_covered;
    for (std::size_t f = 0; f < rel.size(); ++f) rel[f] |= j.relation_covered[f] ? 1 : 0;
    for (std::size_t f = 0; f < kw.size(); ++f) kw[f] |= j.keyword_covered[f] ? 1 : 0;
  }
  return (intent ? 1 : 0) + static_cast<std::size_t>(std::count(rel.begin(), rel.end(), 1)) +
         static_cast<std::size_t>(std::count(kw.begin(), kw.end(), 1));
}

MaxCoverage brute_force_max_coverage_serial(std::span<const FeatureJudgment> judgments) {
  auto masks = feature_masks(judgments);
  const std::uint32_t subsets = std::uint32_t{1} << masks.size();
  Candidate best = evaluate(masks, 0);
  for (std::uint32_t s = 1; s < subsets; ++s) {
    Candidate c = evaluate(masks, s);
    if (better(c, best)) best = c;
  }
  return to_result(best);
}

MaxCoverage brute_force_max_coverage(std::span<const FeatureJudgment> judgments, int threads) {
  auto masks = feature_masks(judgments);
  const long subsets = 1L << masks.size();
  const Candidate empty = evaluate(masks, 0);
  Candidate best = empty;
#pragma omp parallel num_threads(std::max(1, threads))
  {
    Candidate local = empty;
#pragma omp for schedule(static)
    for (long s = 1; s < subsets; ++s) {
      Candidate c = evaluate(masks, static_cast<std::uint32_t>(s));
      if (better(c, local)) local = c;
    }
#pragma omp critical(coe_brute_force_merge)
    {
      if (better(local, best)) best = local;
    }
  }
  return to_result(best);
}

void to_json(json& j, const CoverageReport& r) {
  j = json{{"intent_snippet_count", r.intent_snippet_count},
           {"intent_covered", r.intent_covered},
           {"covered_relations", r.covered_relations},
           {"uncovered_relations", r.uncovered_relations},
           {"covered_keywords", r.covered_keywords},
           {"uncovered_keywords", r.uncovered_keywords},
           {"selected_ids", r.selected_ids}};
}

void from_json(const json& j, CoverageReport& r) {
  r.intent_snippet_count = j.at("intent_snippet_count").get<std::size_t>();
  r.intent_covered = j.at("intent_covered").get<bool>();
  r.covered_relations = j.at("covered_relations").get<std::vector<std::size_t>>();
  r.uncovered_relations = j.at("uncovered_relations").get<std::vector<std::size_t>>();
  r.covered_keywords = j.at("covered_keywords").get<std::vector<std::size_t>>();
  r.uncovered_keywords = j.at("uncovered_keywords").get<std::vector<std::size_t>>();
  r.selected_ids = j.at("selected_ids").get<std::vector<std::string>>();
}

}  // namespace coe
