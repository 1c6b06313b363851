#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coe/gateway.hpp"
#include "coe/model.hpp"

namespace coe {

struct IntentKeywords {
  std::string intent;
  std::vector<std::string> keywords;
};

// One call with the intent/keyword prompt. Keywords are trimmed and
// deduplicated case-insensitively, first occurrence kept. On an unparseable
// response the prompt is retried once with an instruction to emit only the
// JSON object; a second failure raises MalformedResponseError.
IntentKeywords extract_intent_keywords(Gateway& gw, std::string_view question);

// Relations whose keyword pair is not a subset of `keywords`, or that are
// otherwise invalid, are dropped and a line is appended to `warnings`.
// Pair entries are mapped to the surface form used in `keywords`.
std::vector<Relation> extract_relations(Gateway& gw, std::string_view question,
                                        std::span<const std::string> keywords,
                                        std::vector<std::string>* warnings = nullptr);

// Both extraction calls, then normalization (trim, dedupe, drop invalid
// relations) and validation. Throws ValidationError when a violation
// survives normalization.
QuestionFeatures extract_question_features(Gateway& gw, std::string_view question,
                                           std::vector<std::string>* warnings = nullptr);

std::vector<std::string> dedupe_keywords(std::span<const std::string> keywords);

QuestionFeatures normalize_features(QuestionFeatures f, std::vector<std::string>* warnings = nullptr);

}  // namespace coe
