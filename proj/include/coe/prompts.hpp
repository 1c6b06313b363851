#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coe {

enum class OutputKind { structured_object, yes_no, phrase, free_text };

// A prompt body with [Name] placeholders. Only names listed in `variables`
// are placeholders; every other bracketed text is literal.
struct PromptTemplate {
  std::string name;
  std::string body;
  std::vector<std::string> variables;
  OutputKind expected_output = OutputKind::free_text;
};

using Bindings = std::map<std::string, std::string>;

namespace templates {
inline constexpr std::string_view kIntentKeywordExtraction = "intent_keyword_extraction";
inline constexpr std::string_view kRelationExtraction = "relation_extraction";
inline constexpr std::string_view kIntentDiscrimination = "intent_discrimination";
inline constexpr std::string_view kKeywordDiscrimination = "keyword_discrimination";
inline constexpr std::string_view kRelationDiscrimination = "relation_discrimination";
inline constexpr std::string_view kAnswerGeneration = "answer_generation";
inline constexpr std::string_view kKeywordGeneralization = "keyword_generalization";
inline constexpr std::string_view kMisinformationStatement = "misinformation_statement";
inline constexpr std::string_view kQaAnswer = "qa_answer";
inline constexpr std::string_view kConsistencyJudge = "consistency_judge";
}  // namespace templates

const std::vector<PromptTemplate>& all_templates();

// Throws coe::Error for an unknown name.
const PromptTemplate& prompt_template(std::string_view name);

// Names that look like placeholders: "[" + capitalized words + "]".
std::vector<std::string> placeholders_in(std::string_view body);

// Empty iff every placeholder-shaped token in the body is a declared variable
// and every declared variable occurs in the body.
std::vector<std::string> check_template(const PromptTemplate& t);

// Single left-to-right pass; substituted values are never rescanned.
// Throws MissingBindingError naming the first unbound placeholder.
std::string render_prompt(const PromptTemplate& t, const Bindings& bindings);

// ["a", "b"] with ", " separators, matching the few-shot examples.
std::string format_keyword_list(std::span<const std::string> keywords);

// Digest of each template body, keyed by name.
std::map<std::string, std::string> template_digests();

}  // namespace coe
