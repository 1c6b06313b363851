#include <gtest/gtest.h>

#include "coe/discrimination.hpp"
#include "coe/mock_backend.hpp"
#include "coe/prompts.hpp"
#include "support.hpp"

namespace coe {
namespace {

MockRules lee_rules() {
  MockRules r;
  r.extraction["Lee Jun-fan played what character in \"The Green Hornet\" television series?"] =
      QuestionFeatures{"Name of character",
                       {"Lee Jun-fan", "The Green Hornet"},
                       {{{"Lee Jun-fan", "The Green Hornet"}, "Lee Jun-fan played character in The Green Hornet."}}};
  r.intent_cues["City address Information"] = {"head office in"};
  r.phrases["United States"] = "Canada";
  return r;
}

TEST(Mock, KeywordContainment) {
  Gateway gw = testing::mock_gateway(lee_rules());
  EXPECT_TRUE(judge_keyword(gw, "The Oberoi family is part of a hotel company that has a head office in Delhi.",
                            "hotel company"));
  EXPECT_FALSE(judge_keyword(gw, "The Oberoi family is part of a business organization.", "hotel company"));
  EXPECT_TRUE(judge_keyword(gw, "Oberoi family", "Oberoi family"));
}

TEST(Mock, RelationNeedsBothPairKeywords) {
  Gateway gw = testing::mock_gateway(lee_rules());
  Relation r{{"Lee Jun-fan", "The Green Hornet"}, "Lee Jun-fan played character in The Green Hornet."};
  EXPECT_TRUE(judge_relation(gw, "Lee Jun-fan starred as Kato in The Green Hornet.", r));
  EXPECT_FALSE(judge_relation(gw, "Lee Jun-fan was a martial artist.", r));
  EXPECT_FALSE(judge_relation(gw, "Nothing relevant.", r));
}

TEST(Mock, IntentByTextOrCue) {
  Gateway gw = testing::mock_gateway(lee_rules());
  EXPECT_TRUE(judge_intent(gw, "The group has its head office in Delhi.", "City address Information"));
  EXPECT_FALSE(judge_intent(gw, "The tower is 300 metres tall.", "Nationality of person"));
  EXPECT_TRUE(judge_intent(gw, "Nationality of person: Swiss.", "Nationality of person"));
}

TEST(Mock, ExtractionLookupAndUnknownQuestion) {
  auto backend = std::make_shared<MockBackend>(lee_rules());
  Gateway gw = testing::gateway_for(backend);
  auto known = gw.complete(gw.request(templates::kIntentKeywordExtraction,
                                      {{"Question", lee_rules().extraction.begin()->first}}));
  EXPECT_EQ(json::parse(known)["Keywords"], json::parse(R"(["Lee Jun-fan", "The Green Hornet"])"));
  auto unknown = gw.complete(gw.request(templates::kIntentKeywordExtraction, {{"Question", "Who?"}}));
  EXPECT_EQ(json::parse(unknown), json::parse(R"({"Intent": "unknown", "Keywords": []})"));
  auto rel = gw.complete(gw.request(templates::kRelationExtraction, {{"Question", "Who?"}, {"Keywords", "[]"}}));
  EXPECT_EQ(rel, "[]");
}

TEST(Mock, PhrasesAndConsistency) {
  Gateway gw = testing::mock_gateway(lee_rules());
  EXPECT_EQ(gw.complete(gw.request(templates::kAnswerGeneration, {{"Correct Answer", "United States"}})), "Canada");
  EXPECT_EQ(gw.complete(gw.request(templates::kKeywordGeneralization, {{"Keyword", "zzz"}})), "unknown");
  auto consistent = [&](const std::string& ref, const std::string& out) {
    return gw.complete(gw.request(templates::kConsistencyJudge,
                                  {{"Question", "q"}, {"Reference Answer", ref}, {"Response", out}}));
  };
  EXPECT_EQ(consistent("New York", "The city is New York."), "yes");
  EXPECT_EQ(consistent("New York", "Toronto"), "no");
}

TEST(Mock, ReaderAnswersOnlyFromCoveringContext) {
  MockRules r = lee_rules();
  r.answers["Lee Jun-fan played what character in \"The Green Hornet\" television series?"] = {"Kato", "Batman"};
  Gateway gw = testing::mock_gateway(r);
  const std::string q = r.answers.begin()->first;
  auto ask = [&](const std::string& ctx) {
    return gw.complete(gw.request(templates::kQaAnswer, {{"Context", ctx}, {"Question", q}}));
  };
  EXPECT_EQ(ask("Lee Jun-fan played Kato in The Green Hornet. Name of character: Kato."), "Kato");
  EXPECT_EQ(ask("Lee Jun-fan played Kato."), "I don't know.");
  EXPECT_EQ(ask("Name of character in The Green Hornet: Lee Jun-fan played Batman, or Batman, or Kato."), "Batman");
}

TEST(Mock, AddSamplesKeepsExistingEntries) {
  MockRules r;
  r.phrases["Paris"] = "Lyon";
  QASample s;
  s.question = "Q";
  s.answer = "Paris";
  s.features = {"i", {"k"}, {}};
  r.answers["Q"] = {"Rome"};
  r.add_samples(std::vector<QASample>{s});
  EXPECT_EQ(r.answers["Q"], std::vector<std::string>{"Rome"});
  EXPECT_EQ(r.extraction["Q"], s.features);
  s.question = "Q2";
  r.add_samples(std::vector<QASample>{s});
  EXPECT_EQ(r.answers["Q2"], (std::vector<std::string>{"Paris", "Lyon"}));
  EXPECT_EQ(MockRules::from_json(r.to_json()).to_json(), r.to_json());
}

TEST(Mock, DeterministicAcrossInstances) {
  auto a = std::make_shared<MockBackend>(lee_rules());
  auto b = std::make_shared<MockBackend>(lee_rules());
  EXPECT_TRUE(a->deterministic());
  CompletionRequest req;
  req.template_name = std::string(templates::kMisinformationStatement);
  req.bindings = {{"Question", "q"}, {"Incorrect Answer", "Mumbai"}, {"Variant", "7"}};
  EXPECT_EQ(a->complete(req, ""), b->complete(req, ""));
  EXPECT_NE(a->complete(req, "").find("Mumbai"), std::string::npos);
}

}  // namespace
}  // namespace coe
