#include <gtest/gtest.h>

#include "coe/errors.hpp"
#include "coe/extraction.hpp"
#include "support.hpp"

namespace coe {
namespace {

using testing::SequenceBackend;

TEST(IntentKeywords, ParsesThroughChatter) {
  auto backend = std::make_shared<SequenceBackend>(std::vector<std::string>{
      R"(Sure. Output: { "Intent": " City address Information ", "Keywords": ["750 7th Avenue", "101 Park Avenue", "750 7th avenue"] })"});
  Gateway gw = testing::gateway_for(backend);
  auto ik = extract_intent_keywords(gw, "750 7th Avenue and 101 Park Avenue, are located in which city?");
  EXPECT_EQ(ik.intent, "City address Information");
  EXPECT_EQ(ik.keywords, (std::vector<std::string>{"750 7th Avenue", "101 Park Avenue"}));
  ASSERT_EQ(backend->prompts.size(), 1u);
  EXPECT_NE(backend->prompts[0].find("Question: 750 7th Avenue and 101 Park Avenue"), std::string::npos);
}

TEST(IntentKeywords, RepromptsOnceThenFails) {
  auto ok = std::make_shared<SequenceBackend>(
      std::vector<std::string>{"I cannot comply.", R"({"Intent": "Length of track", "Keywords": ["x"]})"});
  Gateway gw = testing::gateway_for(ok);
  EXPECT_EQ(extract_intent_keywords(gw, "q?").intent, "Length of track");
  ASSERT_EQ(ok->prompts.size(), 2u);
  EXPECT_NE(ok->prompts[1].find("Output only the JSON object"), std::string::npos);

  auto bad = std::make_shared<SequenceBackend>(std::vector<std::string>{"nope", R"({"Intent": 4})"});
  Gateway gw2 = testing::gateway_for(bad);
  EXPECT_THROW(extract_intent_keywords(gw2, "q?"), MalformedResponseError);
  EXPECT_EQ(bad->prompts.size(), 2u);
  EXPECT_THROW(extract_intent_keywords(gw2, "  "), PreconditionError);
}

TEST(Relations, DropsPairsOutsideTheKeywordList) {
  auto backend = std::make_shared<SequenceBackend>(std::vector<std::string>{
      R"([{"Keywords": ["james henry miller", "wife"], "Description": "James Henry Miller has a wife."},
          {"Keywords": ["James Henry Miller", "Margaret"], "Description": "Margaret married him."},
          {"Keywords": ["James Henry Miller"], "Description": "one"},
          "garbage"])"});
  Gateway gw = testing::gateway_for(backend);
  std::vector<std::string> kws{"James Henry Miller", "wife"};
  std::vector<std::string> warnings;
  auto rels = extract_relations(gw, "q", kws, &warnings);
  ASSERT_EQ(rels.size(), 1u);
  EXPECT_EQ(rels[0].keyword_pair, (std::vector<std::string>{"James Henry Miller", "wife"}));
  EXPECT_EQ(warnings.size(), 3u);
  EXPECT_NE(backend->prompts[0].find(R"(Keywords: ["James Henry Miller", "wife"])"), std::string::npos);
  EXPECT_THROW(extract_relations(gw, "q", std::vector<std::string>{}), PreconditionError);
}

TEST(Relations, ForeignKeywordMentionIsDropped) {
  auto backend = std::make_shared<SequenceBackend>(std::vector<std::string>{
      R"([{"Keywords": ["a b", "c"], "Description": "a b meets c near d"}])"});
  Gateway gw = testing::gateway_for(backend);
  std::vector<std::string> warnings;
  EXPECT_TRUE(extract_relations(gw, "q", std::vector<std::string>{"a b", "c", "d"}, &warnings).empty());
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("outside its pair"), std::string::npos);
}

TEST(Features, FullExtractionAgainstTheMock) {
  MockRules rules;
  QuestionFeatures f{"Name of character",
                     {"Lee Jun-fan", "The Green Hornet"},
                     {{{"Lee Jun-fan", "The Green Hornet"}, "Lee Jun-fan played character in The Green Hornet."}}};
  const std::string q = "Lee Jun-fan played what character in \"The Green Hornet\" television series?";
  rules.extraction[q] = f;
  Gateway gw = testing::mock_gateway(rules);
  EXPECT_EQ(extract_question_features(gw, q), f);
  auto unknown = extract_question_features(gw, "Who?");
  EXPECT_EQ(unknown.intent, "unknown");
  EXPECT_TRUE(unknown.keywords.empty());
}

TEST(Features, SurvivingViolationRaisesValidationError) {
  auto backend = std::make_shared<SequenceBackend>(
      std::vector<std::string>{R"({"Intent": "", "Keywords": ["x"]})", "[]"});
  Gateway gw = testing::gateway_for(backend);
  try {
    extract_question_features(gw, "q?");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations(), std::vector<std::string>{"intent: intent empty"});
  }
}

TEST(Features, NormalizeTrimsAndDedupes) {
  QuestionFeatures f{" i ", {"A", " a", "b"}, {{{"a", "B"}, " a with b "}}};
  auto n = normalize_features(f);
  EXPECT_EQ(n.intent, "i");
  EXPECT_EQ(n.keywords, (std::vector<std::string>{"A", "b"}));
  ASSERT_EQ(n.relations.size(), 1u);
  EXPECT_EQ(n.relations[0].keyword_pair, (std::vector<std::string>{"A", "b"}));
  EXPECT_EQ(n.relations[0].description, "a with b");
}

}  // namespace
}  // namespace coe
