#include <gtest/gtest.h>

#include <random>
#include <set>

#include "coe/errors.hpp"
#include "coe/perturbation.hpp"
#include "support.hpp"

namespace coe {
namespace {

const std::string kQuestion = "The Oberoi family is part of a hotel company that has a head office in what city?";

QASample oberoi(std::string coe, std::vector<std::string> keywords) {
  QASample s;
  s.question = kQuestion;
  s.answer = "Delhi";
  s.coe = std::move(coe);
  s.features = {"City address Information", std::move(keywords), {}};
  return s;
}

MockRules oberoi_rules() {
  MockRules r;
  r.intent_cues["City address Information"] = {"head office", "Delhi"};
  r.phrases["hotel company"] = "business organization";
  r.phrases["United States"] = "Canada";
  r.phrases["September 29, 1784"] = "April 22, 1964";
  r.phrases["39,134"] = "19,203";
  return r;
}

TEST(Segment, TerminatorsAndReconstruction) {
  SegmentOptions no_guard;
  no_guard.guard_single_letter = false;
  EXPECT_EQ(segment_sentences("A. B! C?", no_guard).sentences, (std::vector<std::string>{"A.", "B!", "C?"}));
  EXPECT_EQ(segment_sentences("A. B! C?").sentences, (std::vector<std::string>{"A. B!", "C?"}));
  auto s = segment_sentences("He was born on Sept. 29, 1784 in Ohio. He left.");
  EXPECT_EQ(s.sentences, (std::vector<std::string>{"He was born on Sept. 29, 1784 in Ohio.", "He left."}));
  EXPECT_EQ(segment_sentences("no terminator here").sentences, std::vector<std::string>{"no terminator here"});
  EXPECT_EQ(segment_sentences("Mr. Smith moved to the U.S. in 1990. Prices rose 3.5 percent.").sentences.size(), 2u);
  EXPECT_EQ(segment_sentences("He said \"Stop!\" Then he left.").sentences,
            (std::vector<std::string>{"He said \"Stop!\"", "Then he left."}));
}

TEST(Segment, JoinReproducesArbitraryInput) {
  std::mt19937 gen(9);
  const std::string alphabet = "ab .!?\"\n)A";
  for (int t = 0; t < 2000; ++t) {
    std::string in;
    const int n = static_cast<int>(gen() % 40);
    for (int i = 0; i < n; ++i) in += alphabet[gen() % alphabet.size()];
    auto split = segment_sentences(in);
    ASSERT_EQ(split.join(), in) << '"' << in << '"';
    ASSERT_EQ(split.sentences.size(), split.separators.size());
  }
}

TEST(Senp, RemovesTheOnlySentenceCarryingAKeyword) {
  auto s = oberoi("The Oberoi family owns hotels in Delhi. The group has its head office in the capital. Delhi is "
                  "the capital.",
                  {"Oberoi family", "head office"});
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto disc = make_discriminator(gw);
  ASSERT_TRUE(disc(s.coe, s.features).is_coe);
  auto r = senp(s, disc);
  EXPECT_EQ(r.removed, std::vector<std::size_t>{1});
  EXPECT_EQ(r.text, "The Oberoi family owns hotels in Delhi. Delhi is the capital.");
  EXPECT_FALSE(disc(r.text, s.features).is_coe);
}

TEST(Senp, FailurePaths) {
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto disc = make_discriminator(gw);
  auto all_answer = oberoi("The Oberoi family head office is in Delhi. Delhi it is.", {"Oberoi family", "head office"});
  EXPECT_THROW(senp(all_answer, disc), NoCandidatesError);
  auto redundant = oberoi("The Oberoi family head office is in Delhi. The Oberoi family has a head office.",
                          {"Oberoi family", "head office"});
  EXPECT_THROW(senp(redundant, disc), NeverBreaksError);
  auto not_coe = oberoi("Nothing useful.", {"Oberoi family"});
  EXPECT_THROW(senp(not_coe, disc), PreconditionError);
}

TEST(Senp, CumulativeRemovalInDocumentOrder) {
  // Two copies of the keyword sentence: each single removal leaves the other.
  auto s = oberoi("The Oberoi family has a head office. The Oberoi family has a head office. It is in Delhi.",
                  {"Oberoi family", "head office"});
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto disc = make_discriminator(gw);
  auto r = senp(s, disc);
  EXPECT_EQ(r.removed, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.text, "It is in Delhi.");
}

TEST(Wordp, HypernymReplacesEveryMention) {
  auto s = oberoi("The Oberoi family is part of a hotel company. The Hotel Company has its head office in Delhi.",
                  {"hotel company"});
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto r = wordp(gw, s, 1, make_discriminator(gw));
  EXPECT_EQ(r.keyword, "hotel company");
  EXPECT_EQ(r.hypernym, "business organization");
  EXPECT_EQ(r.replacements, 2u);
  EXPECT_EQ(r.text,
            "The Oberoi family is part of a business organization. The business organization has its head office in "
            "Delhi.");
}

TEST(Wordp, AbsentKeywordIsSkippedForEverySeed) {
  auto s = oberoi("The Oberoi family is part of a hotel company with its head office in Delhi.",
                  {"Taj brand", "hotel company"});
  MockRules rules = oberoi_rules();
  rules.phrases["Taj brand"] = "brand";
  Gateway gw = testing::mock_gateway(rules);
  CoeDiscriminator disc = [](std::string_view k, const QuestionFeatures&) {
    return CoEVerdict::from_missing(text::icontains(k, "hotel company") ? std::vector<std::string>{}
                                                                         : std::vector<std::string>{"keyword[1]"});
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = wordp(gw, s, seed, disc);
    EXPECT_EQ(r.keyword, "hotel company");
    EXPECT_EQ(r.text, wordp(gw, s, seed, disc).text);
  }
  auto none = oberoi("nothing", {"Taj brand"});
  EXPECT_THROW(wordp(gw, none, 0, disc), ExhaustedKeywordsError);
  EXPECT_THROW(wordp(gw, oberoi("x", {}), 0, disc), PreconditionError);
}

TEST(Wordp, SameSeedSameOutputAndAlwaysNonCoe) {
  MockRules rules = oberoi_rules();
  rules.phrases["Oberoi family"] = "family";
  rules.phrases["head office"] = "office";
  Gateway gw = testing::mock_gateway(rules);
  auto disc = make_discriminator(gw);
  auto s = oberoi("The Oberoi family is part of a hotel company that has a head office in Delhi.",
                  {"Oberoi family", "hotel company", "head office"});
  std::set<std::string> chosen;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto a = wordp(gw, s, seed, disc);
    auto b = wordp(gw, s, seed, disc);
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.keyword, b.keyword);
    EXPECT_FALSE(disc(a.text, s.features).is_coe);
    chosen.insert(a.keyword);
  }
  EXPECT_GT(chosen.size(), 1u);
}

TEST(IncorrectAnswer, FewShotPairsAndFormats) {
  Gateway gw = testing::mock_gateway(oberoi_rules());
  EXPECT_EQ(generate_incorrect_answer(gw, "United States"), "Canada");
  EXPECT_EQ(generate_incorrect_answer(gw, "September 29, 1784"), "April 22, 1964");
  EXPECT_EQ(generate_incorrect_answer(gw, "39,134"), "19,203");
  EXPECT_EQ(answer_format("September 29, 1784"), "month-day-year");
  EXPECT_EQ(answer_format("29 Sept. 1784"), "day-month-year");
  EXPECT_EQ(answer_format("1784"), "year");
  EXPECT_EQ(answer_format("1,234,567.5"), "separated-number");
  EXPECT_EQ(answer_format("Canada"), "");
}

TEST(IncorrectAnswer, RetriesOnceOnFormatMismatch) {
  auto ok = std::make_shared<testing::SequenceBackend>(std::vector<std::string>{"1964", "April 22, 1964"});
  Gateway gw = testing::gateway_for(ok);
  EXPECT_EQ(generate_incorrect_answer(gw, "September 29, 1784"), "April 22, 1964");
  EXPECT_EQ(ok->prompts.size(), 2u);

  auto same = std::make_shared<testing::SequenceBackend>(std::vector<std::string>{"canada", "Canada."});
  Gateway gw2 = testing::gateway_for(same);
  EXPECT_THROW(generate_incorrect_answer(gw2, "Canada"), FormatMismatchError);
  auto numbers = std::make_shared<testing::SequenceBackend>(std::vector<std::string>{"19203", "many"});
  Gateway gw3 = testing::gateway_for(numbers);
  EXPECT_THROW(generate_incorrect_answer(gw3, "39,134"), FormatMismatchError);
}

TEST(Substitute, CountsAndLengthProperty) {
  auto r = substitute_answer("It is located in the United States.", "United States", "Canada");
  EXPECT_EQ(r.text, "It is located in the Canada.");
  EXPECT_EQ(r.count, 1u);
  const std::string three = "Delhi, delhi and DELHI.";
  auto t = substitute_answer(three, "Delhi", "Mumbai");
  EXPECT_EQ(t.count, 3u);
  EXPECT_FALSE(text::icontains(t.text, "Delhi"));
  EXPECT_EQ(static_cast<long>(t.text.size()) - static_cast<long>(three.size()),
            (static_cast<long>(std::string("Mumbai").size()) - 5) * 3);
  EXPECT_THROW(substitute_answer("nothing", "Delhi", "Mumbai"), NotFoundError);
}

TEST(Misinformation, SingleEntityReplacement) {
  auto s = oberoi("The Oberoi family is part of The Oberoi Group. Its head office is in Delhi.", {"Oberoi family"});
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto m = generate_misinformation(gw, s, "Mumbai", 1, 3);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].text(), "Its head office is in Mumbai.");
  EXPECT_EQ(m[0].provenance(), Provenance::misinformation);
  EXPECT_EQ(gw.backend_calls(), 0u);
  EXPECT_THROW(generate_misinformation(gw, s, "delhi", 1, 3), PreconditionError);
}

TEST(Misinformation, AlternatesStrategies) {
  auto s = oberoi("Delhi hosts the head office. The Oberoi family is from Delhi. The group is large.", {"Oberoi family"});
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto m = generate_misinformation(gw, s, "Mumbai", 4, 3);
  ASSERT_EQ(m.size(), 4u);
  std::size_t replaced = 0;
  for (const auto& x : m) {
    EXPECT_NE(x.text().find("Mumbai"), std::string::npos);
    if (x.text() == "Mumbai hosts the head office." || x.text() == "The Oberoi family is from Mumbai.") ++replaced;
  }
  EXPECT_EQ(replaced, 2u);
  EXPECT_EQ(gw.backend_calls(), 2u);
  auto again = generate_misinformation(gw, s, "Mumbai", 4, 3);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(again[i].text(), m[i].text());
}

TEST(Misinformation, OmittedAnswerIsRetriedThenRejected) {
  auto s = oberoi("The group is large.", {"Oberoi family"});
  auto backend = std::make_shared<testing::SequenceBackend>(std::vector<std::string>{"vague", "still vague"});
  Gateway gw = testing::gateway_for(backend);
  EXPECT_THROW(generate_misinformation(gw, s, "Mumbai", 1, 0), ValidationError);
  ASSERT_EQ(backend->prompts.size(), 2u);
  EXPECT_NE(backend->prompts[1].find("must contain \"Mumbai\""), std::string::npos);
}

}  // namespace
}  // namespace coe
