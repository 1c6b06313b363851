#include <gtest/gtest.h>

#include <map>

#include "coe/errors.hpp"
#include "coe/prompts.hpp"
#include "support.hpp"

namespace coe {
namespace {

// Canonical bindings for the golden transcripts in tests/golden. The six
// published prompts were transcribed independently of the source tree; the
// four artifact-authored ones were frozen when written.
const std::map<std::string, Bindings>& canonical_bindings() {
  static const std::map<std::string, Bindings> k{
      {"intent_keyword_extraction",
       {{"Question", "The Oberoi family is part of a hotel company that has a head office in what city?"}}},
      {"relation_extraction",
       {{"Question", "Lee Jun-fan played what character in \"The Green Hornet\" television series?"},
        {"Keywords", "[\"Lee Jun-fan\", \"The Green Hornet\"]"}}},
      {"intent_discrimination",
       {{"Intent", "City address Information"},
        {"External Knowledge", "The Oberoi Group is a hotel company with its head office in Delhi."}}},
      {"keyword_discrimination",
       {{"Keyword", "Oberoi family"},
        {"External Knowledge", "The Oberoi family is part of a hotel company that has a head office in Delhi."}}},
      {"relation_discrimination",
       {{"Relation", "Lee Jun-fan played character in The Green Hornet."},
        {"External Knowledge", "Lee Jun-fan played Kato in The Green Hornet television series."}}},
      {"answer_generation", {{"Correct Answer", "September 29, 1784"}}},
      {"keyword_generalization", {{"Keyword", "hotel company"}}},
      {"misinformation_statement",
       {{"Question", "The Oberoi family is part of a hotel company that has a head office in what city?"},
        {"Incorrect Answer", "Mumbai"},
        {"Variant", "2"}}},
      {"qa_answer",
       {{"Context",
         "The Oberoi family is part of The Oberoi Group.\n\nThe Oberoi Group is a hotel company with its head office "
         "in Delhi."},
        {"Question", "The Oberoi family is part of a hotel company that has a head office in what city?"}}},
      {"consistency_judge",
       {{"Question", "The Oberoi family is part of a hotel company that has a head office in what city?"},
        {"Reference Answer", "Delhi"},
        {"Response", "The head office is in New Delhi."}}},
  };
  return k;
}

TEST(Prompts, EveryTemplateHasAGoldenTranscript) {
  ASSERT_EQ(all_templates().size(), canonical_bindings().size());
  for (const auto& t : all_templates()) {
    auto it = canonical_bindings().find(t.name);
    ASSERT_NE(it, canonical_bindings().end()) << t.name;
    const std::string golden = read_file(testing::source_path("tests/golden/" + t.name + ".txt"));
    EXPECT_EQ(render_prompt(t, it->second), golden) << t.name;
  }
}

TEST(Prompts, DeclaredVariablesMatchPlaceholders) {
  for (const auto& t : all_templates()) {
    EXPECT_TRUE(check_template(t).empty()) << t.name;
  }
  PromptTemplate bad{"x", "Input: [Foo] and [Bar]", {"Foo", "Baz"}, OutputKind::free_text};
  EXPECT_EQ(check_template(bad), (std::vector<std::string>{"undeclared placeholder [Bar]",
                                                           "declared variable [Baz] does not occur in body"}));
}

TEST(Prompts, FewShotExamplesAreVerbatim) {
  const auto& ik = prompt_template(templates::kIntentKeywordExtraction).body;
  EXPECT_NE(ik.find("Question:750 7th Avenue and 101 Park Avenue, are located in which city?"), std::string::npos);
  EXPECT_NE(ik.find(R"(Output: { "Intent": "Name of American football game", "Keywords": ["Malcolm Smith", "Most Valuable player"] })"),
            std::string::npos);
  const auto& rel = prompt_template(templates::kRelationExtraction).body;
  EXPECT_NE(rel.find(R"([{"Keywords":["Lee Jun-fan", "The Green Hornet"], "Description: "Lee Jun-fan played character in The Green Hornet."}])"),
            std::string::npos);
  const auto& ag = prompt_template(templates::kAnswerGeneration).body;
  EXPECT_NE(ag.find("Input phrase: United States\n\nOutput: Canada"), std::string::npos);
  EXPECT_NE(ag.find("Input phrase: 39,134\n\nOutput: 19,203"), std::string::npos);
  for (auto name : {templates::kIntentKeywordExtraction, templates::kRelationExtraction, templates::kAnswerGeneration}) {
    const auto& body = prompt_template(name).body;
    for (int i = 1; i <= 5; ++i) {
      EXPECT_NE(body.find("Example" + std::to_string(i) + ":"), std::string::npos) << name << " " << i;
    }
    EXPECT_EQ(body.find("Example6:"), std::string::npos);
  }
}

TEST(Prompts, QuestionFollowsLiteralPrefix) {
  const std::string q = "750 7th Avenue and 101 Park Avenue, are located in which city?";
  auto out = render_prompt(prompt_template(templates::kIntentKeywordExtraction), {{"Question", q}});
  EXPECT_NE(out.find("Question: " + q + "\n\nOutput:"), std::string::npos);
  EXPECT_EQ(out.substr(out.size() - 7), "Output:");
}

TEST(Prompts, MissingBindingNamesThePlaceholder) {
  for (const auto& t : all_templates()) {
    try {
      render_prompt(t, {});
      FAIL() << t.name;
    } catch (const MissingBindingError& e) {
      EXPECT_EQ(e.placeholder(), t.variables.front()) << t.name;
    }
  }
}

TEST(Prompts, SubstitutedValuesAreNotRescanned) {
  const auto& t = prompt_template(templates::kKeywordDiscrimination);
  auto out = render_prompt(t, {{"Keyword", "[External Knowledge]"}, {"External Knowledge", "EK"}});
  EXPECT_NE(out.find("Input Keyword: [External Knowledge]"), std::string::npos);
  EXPECT_NE(out.find("Input external knowledge: EK"), std::string::npos);
}

TEST(Prompts, BracketedTextInBodyIsLiteralUnlessDeclared) {
  // The relation prompt's examples contain JSON arrays in brackets.
  const auto& t = prompt_template(templates::kRelationExtraction);
  auto out = render_prompt(t, {{"Question", "Q"}, {"Keywords", "K"}});
  EXPECT_NE(out.find("Output: []"), std::string::npos);
  EXPECT_NE(out.find("Keywords: K\n\nOutput:"), std::string::npos);
}

TEST(Prompts, KeywordListFormatting) {
  std::vector<std::string> k{"Lee Jun-fan", "The \"Green\" Hornet"};
  EXPECT_EQ(format_keyword_list(k), R"(["Lee Jun-fan", "The \"Green\" Hornet"])");
  EXPECT_EQ(format_keyword_list({}), "[]");
}

TEST(Prompts, DigestsCoverEveryTemplate) {
  auto d = template_digests();
  EXPECT_EQ(d.size(), all_templates().size());
  for (const auto& [name, digest] : d) EXPECT_EQ(digest.size(), 64u) << name;
  EXPECT_THROW(prompt_template("nope"), Error);
}

}  // namespace
}  // namespace coe
