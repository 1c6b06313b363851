#include "coe/prompts.hpp"

#include <algorithm>
#include <regex>

#include "coe/digest.hpp"
#include "coe/errors.hpp"
#include "json.hpp"

namespace coe {
namespace {

constexpr std::string_view kIntentKeywordBody =
    R"(Please extract both the intent and keywords of the question, using the following criteria:

1) As for intent, please indicate the content intent of the evidence that the question expects, without going into specific details.

2) As for keywords, Please extract the specific details of the question.

The output must be in json format, consistent with the sample.
Here are some examples:

Example1:

Question:750 7th Avenue and 101 Park Avenue, are located in which city?

Output: { "Intent": "City address Information", "Keywords": ["750 7th Avenue", "101 Park Avenue"] }

Example2:

Question: The Oberoi family is part of a hotel company that has a head office in what city?

Output: { "Intent": "City address Information", "Keywords": ["Oberoi family", "head office"] }

Example3:

Question: What nationality was James Henry Miller's wife?

Output: { "Intent": "Nationality of person", "Keywords": ["James Henry Miller", "wife"] }

Example4:

Question: What is the length of the track where the 2013 Liqui Moly Bathurst 12 Hour was staged?

Output: { "Intent": "Length of track", "Keywords": ["2013 Liqui Moly Bathurst 12 Hour"] }

Example5:

Question: In which American football game was Malcolm Smith named Most Valuable player?

Output: { "Intent": "Name of American football game", "Keywords": ["Malcolm Smith", "Most Valuable player"] }

Question: [Question]

Output:)";

// The repeated instruction lines and the unbalanced quote in Example2 are
// deliberate; changing them changes every cache key.
constexpr std::string_view kRelationBody =
    R"(Please extract relations based on the input questions and keywords, using the following criteria:

1) Each relation has two elements, the implied keywords and the textual description of the relation.

2) The description of the relation is limited to the two keywords and does not involve other keywords.

3) If there is no relation between keywords, no extraction is required.

The output must be in json format, consistent with the examples.
Here are some examples:

The output must be in json format, consistent with the sample.
Here are some examples:

Example1:

Question:750 7th Avenue and 101 Park Avenue, are located in which city?

Keywords:["750 7th Avenue", "101 Park Avenue"]

Output: []

Example2:

Question: Lee Jun-fan played what character in "The Green Hornet" television series?

Keywords:["Lee Jun-fan", "The Green Hornet"]

Output: [{"Keywords":["Lee Jun-fan", "The Green Hornet"], "Description: "Lee Jun-fan played character in The Green Hornet."}]

Example3:

Question: In which stadium do the teams owned by Myra Kraft's husband play?

Keywords: ["teams", "Myra Kraft's husband"]

Output: [{"Keywords":["teams", "Myra Kraft's husband"], "Description": "Teams is owned by Myra Kraft's husband."}]

Example4:

Question: The Colts' first ever draft pick was a halfback who won the Heisman Trophy in what year?

Keywords:["Colts' first ever draft pick", "halfback", "Heisman Trophy"]

Output:[{"Keywords":["Colts' first ever draft pick", "halfback"], "Description": "The Colts' first ever draft pick was a halfback."}]

Example5:

Question: The Golden Globe Award winner for best actor from "Roseanne" starred along what actress in Gigantic?

Keywords:["Golden Globe Award winner", "best actor", "Roseanne", "Gigantic"]

Output: [{"Keywords":["Golden Globe Award winner", "best actor"], "Description": "Golden Globe Award for best actor"}, {"Keywords":["best actor", "Roseanne"], "Description": "The best actor starred in Roseanne."}]

Question: [Question]

Keywords: [Keywords]

Output:)";

constexpr std::string_view kIntentDiscriminationBody =
    R"(Please determine whether the input intent is covered in the input external knowledge. Please output only "yes" or "no".

Input intent: [Intent]

Input external knowledge: [External Knowledge])";

constexpr std::string_view kKeywordDiscriminationBody =
    R"(Please determine if the input keyword is mentioned in the input external knowledge. It doesn't necessarily need to be an exact character match; partial matches or semantic similarities are also acceptable. Please output only "yes" or "no".

Input Keyword: [Keyword]

Input external knowledge: [External Knowledge])";

constexpr std::string_view kRelationDiscriminationBody =
    R"(Please infer whether the input external knowledge can infer the input relation description. If there is definite evidence in the input sentence to prove that the input relation description is true, then output "yes", otherwise output "no". Please output only "yes" or "no".

Input relation description: [Relation]

Input external knowledge: [External Knowledge])";

constexpr std::string_view kAnswerGenerationBody =
    R"(For the input phrase, please generate a phrase of similar type and format, but not the same. Just output the phrase, no explanation is needed, the expression form is consistent with the examples. Here are some examples:

Example1:

Input phrase: United States

Output: Canada

Example2:

Input phrase: alcohol

Output: Soda

Example3:

Input phrase: September 29, 1784

Output: April 22, 1964

Example4:

Input phrase: Laura Ellen Kirk

Output: Elon Musk

Example5:

Input phrase: 39,134

Output: 19,203

Input phrase: [Correct Answer]

Output:)";

// The prompts below follow the style of the ones above.
constexpr std::string_view kKeywordGeneralizationBody =
    R"(For the input keyword, please generate a more general expression that names the broader category the keyword belongs to, so that it can replace every mention of the keyword in a passage without naming the keyword itself. Just output the phrase, no explanation is needed, the expression form is consistent with the examples. Here are some examples:

Example1:

Input keyword: hotel company

Output: business organization

Example2:

Input keyword: wife

Output: family member

Example3:

Input keyword: Heisman Trophy

Output: sports award

Input keyword: [Keyword]

Output:)";

constexpr std::string_view kMisinformationBody =
    R"(Please write one short statement that answers the input question with the input answer, phrased as a factual claim. The statement must contain the input answer exactly as written. Just output the statement, no explanation is needed.

Input question: [Question]

Input answer: [Incorrect Answer]

Statement number: [Variant]

Output:)";

constexpr std::string_view kQaAnswerBody =
    R"(Answer the question based on the external knowledge. Just output the answer, no explanation is needed.

External knowledge:
[Context]

Question: [Question]

Answer:)";

constexpr std::string_view kConsistencyBody =
    R"(You are given a question, a reference answer and a response from a model. Please determine whether the response is consistent with the reference answer, that is, whether it gives the same answer to the question. Differences in wording, formatting or level of detail are acceptable. Please output only "yes" or "no".

Question: [Question]

Reference answer: [Reference Answer]

Response: [Response])";

std::vector<PromptTemplate> build_templates() {
  using namespace templates;
  return {
      {std::string(kIntentKeywordExtraction), std::string(kIntentKeywordBody), {"Question"},
       OutputKind::structured_object},
      {std::string(kRelationExtraction), std::string(kRelationBody), {"Question", "Keywords"},
       OutputKind::structured_object},
      {std::string(kIntentDiscrimination), std::string(kIntentDiscriminationBody),
       {"Intent", "External Knowledge"}, OutputKind::yes_no},
      {std::string(kKeywordDiscrimination), std::string(kKeywordDiscriminationBody),
       {"Keyword", "External Knowledge"}, OutputKind::yes_no},
      {std::string(kRelationDiscrimination), std::string(kRelationDiscriminationBody),
       {"Relation", "External Knowledge"}, OutputKind::yes_no},
      {std::string(kAnswerGeneration), std::string(kAnswerGenerationBody), {"Correct Answer"},
       OutputKind::phrase},
      {std::string(kKeywordGeneralization), std::string(kKeywordGeneralizationBody), {"Keyword"},
       OutputKind::phrase},
      {std::string(kMisinformationStatement), std::string(kMisinformationBody),
       {"Question", "Incorrect Answer", "Variant"}, OutputKind::free_text},
      {std::string(kQaAnswer), std::string(kQaAnswerBody), {"Context", "Question"},
       OutputKind::free_text},
      {std::string(kConsistencyJudge), std::string(kConsistencyBody),
       {"Question", "Reference Answer", "Response"}, OutputKind::yes_no},
  };
}

}  // namespace

const std::vector<PromptTemplate>& all_templates() {
  static const std::vector<PromptTemplate> kTemplates = build_templates();
  return kTemplates;
}

const PromptTemplate& prompt_template(std::string_view name) {
  for (const auto& t : all_templates()) {
    if (t.name == name) return t;
  }
  throw Error("unknown prompt template \"" + std::string(name) + "\"");
}

std::vector<std::string> placeholders_in(std::string_view body) {
  static const std::regex kPlaceholder(R"(\[([A-Z][A-Za-z]*(?: [A-Z][A-Za-z]*)*)\])");
  std::vector<std::string> out;
  std::string s(body);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kPlaceholder); it != std::sregex_iterator();
       ++it) {
    std::string name = (*it)[1].str();
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
  }
  return out;
}

std::vector<std::string> check_template(const PromptTemplate& t) {
  std::vector<std::string> problems;
  for (const auto& p : placeholders_in(t.body)) {
    if (std::find(t.variables.begin(), t.variables.end(), p) == t.variables.end()) {
      problems.push_back("undeclared placeholder [" + p + "]");
    }
  }
  for (const auto& v : t.variables) {
    if (t.body.find("[" + v + "]") == std::string::npos) {
      problems.push_back("declared variable [" + v + "] does not occur in body");
    }
  }
  return problems;
}

std::string render_prompt(const PromptTemplate& t, const Bindings& bindings) {
  std::string out;
  out.reserve(t.body.size() + 256);
  std::string_view body = t.body;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '[') {
      bool matched = false;
      for (const auto& var : t.variables) {
        if (body.compare(i + 1, var.size(), var) == 0 && i + 1 + var.size() < body.size() &&
            body[i + 1 + var.size()] == ']') {
          auto it = bindings.find(var);
          if (it == bindings.end()) throw MissingBindingError(var);
          out.append(it->second);
          i += var.size() + 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.push_back(body[i]);
    ++i;
  }
  return out;
}

std::string format_keyword_list(std::span<const std::string> keywords) {
  std::string out = "[";
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (i) out += ", ";
    out += nlohmann::json(keywords[i]).dump();
  }
  out += "]";
  return out;
}

std::map<std::string, std::string> template_digests() {
  std::map<std::string, std::string> out;
  for (const auto& t : all_templates()) out[t.name] = sha256_hex(t.body);
  return out;
}

}  // namespace coe
