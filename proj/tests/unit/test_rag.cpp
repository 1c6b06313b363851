#include <gtest/gtest.h>

#include "coe/errors.hpp"
#include "coe/rag.hpp"
#include "coe/text.hpp"
#include "support.hpp"

namespace coe {
namespace {

QASample oberoi_sample() {
  QASample s;
  s.question = "The Oberoi family is part of a hotel company that has a head office in what city?";
  s.answer = "Delhi";
  s.coe = "The Oberoi family is part of The Oberoi Group. The Oberoi Group is a hotel company. It has a head office "
          "in Delhi. The city is the capital.";
  s.features = {"City address Information", {"Oberoi family", "hotel company", "head office"}, {}};
  return s;
}

std::vector<SearchResult> web(std::size_t n) {
  std::vector<SearchResult> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back({"t", "Web result number " + std::to_string(i) + ".", "u"});
  return v;
}

// Scores fixed per snippet id.
struct TableScorer : RelevanceScorer {
  std::map<std::string, double> table;
  std::string id() const override { return "table"; }
  std::vector<double> score(std::string_view, std::span<const KnowledgeSnippet> s) override {
    std::vector<double> out;
    for (const auto& x : s) out.push_back(table.count(x.id()) ? table.at(x.id()) : 0.0);
    return out;
  }
};

TEST(Corpus, SizesAndDedupe) {
  auto s = oberoi_sample();
  auto c = build_corpus(s, web(10));
  ASSERT_EQ(c.size(), 14u);
  EXPECT_EQ(c[0].id(), "web-000");
  EXPECT_EQ(c[10].id(), "coe-000");
  EXPECT_EQ(c[13].text(), "The city is the capital.");
  EXPECT_EQ(c[13].provenance(), Provenance::coe_piece);
  EXPECT_EQ(build_corpus(s, {}).size(), 4u);
  std::vector<SearchResult> dup{{"a", "Same  text.", "u"}, {"b", "same text.", "v"}, {"c", " ", "w"}};
  EXPECT_EQ(build_corpus(s, dup).size(), 5u);
  // The answer-bearing sentence always makes it into the corpus.
  bool answer = false;
  for (const auto& x : c) answer = answer || text::icontains(x.text(), s.answer);
  EXPECT_TRUE(answer);
  EXPECT_EQ(corpus_digest(c), corpus_digest(build_corpus(s, web(10))));
  EXPECT_NE(corpus_digest(c), corpus_digest(build_corpus(s, web(9))));
}

TEST(Naive, TruncationTiesAndOverlap) {
  std::vector<KnowledgeSnippet> corpus;
  for (int i = 0; i < 9; ++i) {
    corpus.emplace_back("s" + std::to_string(i), "filler words only", Provenance::web);
  }
  corpus[7] = KnowledgeSnippet("s7", "The Oberoi family hotel company head office.", Provenance::web);
  OverlapScorer overlap;
  auto top = naive_rag_select("Oberoi family hotel company head office city?", corpus, 5, overlap);
  ASSERT_EQ(top.size(), 5u);
  EXPECT_EQ(top[0].id(), "s7");
  EXPECT_EQ(top[1].id(), "s0");  // the rest tie at 0 and go by id
  EXPECT_EQ(top[4].id(), "s3");
  std::span<const KnowledgeSnippet> three(corpus.data(), 3);
  EXPECT_EQ(naive_rag_select("q", three, 5, overlap).size(), 3u);

  TableScorer table;
  table.table = {{"s2", 0.5}, {"s5", 0.5}, {"s1", 0.9}};
  auto t = naive_rag_select("q", corpus, 3, table);
  EXPECT_EQ(t[0].id(), "s1");
  EXPECT_EQ(t[1].id(), "s2");
  EXPECT_EQ(t[2].id(), "s5");
}

TEST(Naive, OverlapScoreIgnoresStopwords) {
  OverlapScorer overlap;
  std::vector<KnowledgeSnippet> v{{"a", "Where is the tower?", Provenance::web}, {"b", "Eiffel tower height", Provenance::web}};
  auto s = overlap.score("What is the height of the Eiffel Tower?", v);
  EXPECT_DOUBLE_EQ(s[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_EQ(overlap.score("the of a", v), (std::vector<double>{0.0, 0.0}));
}

MockRules oberoi_rules() {
  MockRules r;
  r.intent_cues["City address Information"] = {"head office in"};
  return r;
}

TEST(Scope, CoePiecesSufficeAndSelectionIsMinimalInPractice) {
  auto s = oberoi_sample();
  auto corpus = build_corpus(s, web(6));
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto sel = scopecoe_select(gw, s.features, corpus, 4);
  for (const auto& x : sel.snippets) EXPECT_EQ(x.provenance(), Provenance::coe_piece);
  std::vector<std::string> ids;
  for (const auto& x : sel.snippets) ids.push_back(x.id());
  EXPECT_EQ(ids, (std::vector<std::string>{"coe-002", "coe-000", "coe-001"}));
  EXPECT_TRUE(sel.report.intent_covered);
  EXPECT_TRUE(sel.report.uncovered_keywords.empty());
  EXPECT_EQ(sel.judgments.size(), corpus.size());
}

TEST(Scope, SingleCoveringSnippetAndMissingIntent) {
  QuestionFeatures f{"City address Information", {"Oberoi family", "hotel company"}, {}};
  std::vector<KnowledgeSnippet> corpus{
      {"n0", "Noise about weather.", Provenance::web},
      {"all", "The Oberoi family runs a hotel company with its head office in Delhi.", Provenance::web},
      {"n1", "More noise.", Provenance::web}};
  Gateway gw = testing::mock_gateway(oberoi_rules());
  auto sel = scopecoe_select(gw, f, corpus, 2);
  ASSERT_EQ(sel.snippets.size(), 1u);
  EXPECT_EQ(sel.snippets[0].id(), "all");

  std::vector<KnowledgeSnippet> no_intent{{"k0", "The Oberoi family.", Provenance::web},
                                          {"k1", "A hotel company.", Provenance::web}};
  auto partial = scopecoe_select(gw, f, no_intent, 2);
  EXPECT_EQ(partial.report.intent_snippet_count, 0u);
  EXPECT_FALSE(partial.report.intent_covered);
  EXPECT_EQ(partial.snippets.size(), 2u);
}

TEST(Comparison, SyntheticScopeBeatsNaive) {
  auto samples = testing::synthetic_samples();
  auto rules = testing::synthetic_rules();
  Gateway answerer = testing::mock_gateway(rules, "reader");
  Gateway judge = testing::mock_gateway(rules);
  FixtureSearchClient search(testing::source_path("data/synthetic/fixtures/rag"));
  OverlapScorer scorer;
  RagOptions opt;
  opt.threads = 4;
  auto cmp = run_rag_comparison(samples, answerer, judge, search, scorer, opt);
  ASSERT_EQ(cmp.arms.size(), 2u);
  EXPECT_EQ(cmp.arms[0].condition, Condition::rag);
  EXPECT_DOUBLE_EQ(cmp.arms[0].mean_pieces, 5.0);
  EXPECT_GT(cmp.arms[1].run.mean, cmp.arms[0].run.mean);
  for (const auto& t : cmp.traces) {
    EXPECT_FALSE(t.error) << t.sample_id;
    EXPECT_EQ(t.naive_corpus_digest, t.scopecoe_corpus_digest);
  }
}

TEST(Comparison, IdenticalSelectionsGiveIdenticalAccuracy) {
  // With k large enough that the baseline takes the whole corpus, and the
  // corpus equal to the CoE pieces, both arms read the same facts.
  auto s = oberoi_sample();
  MockRules rules = oberoi_rules();
  rules.add_samples(std::vector<QASample>{s});
  Gateway answerer = testing::mock_gateway(rules, "reader");
  Gateway judge = testing::mock_gateway(rules);
  struct Empty : SearchClient {
    std::string id() const override { return "empty"; }
    std::vector<SearchResult> search(const std::string&) override { return {}; }
  } search;
  OverlapScorer scorer;
  RagOptions opt;
  opt.k = 100;
  opt.repeats = 1;
  std::vector<QASample> one{s};
  auto cmp = run_rag_comparison(one, answerer, judge, search, scorer, opt);
  EXPECT_DOUBLE_EQ(cmp.arms[0].run.mean, cmp.arms[1].run.mean);
  EXPECT_DOUBLE_EQ(cmp.arms[0].run.mean, 1.0);
}

TEST(Comparison, FailedRetrievalKeepsTheSlot) {
  auto s = oberoi_sample();
  struct Broken : SearchClient {
    std::string id() const override { return "broken"; }
    std::vector<SearchResult> search(const std::string&) override { throw Error("offline"); }
  } search;
  Gateway gw = testing::mock_gateway(oberoi_rules());
  OverlapScorer scorer;
  RagOptions opt;
  opt.repeats = 1;
  std::vector<QASample> one{s};
  auto cmp = run_rag_comparison(one, gw, gw, search, scorer, opt);
  ASSERT_TRUE(cmp.traces[0].error);
  EXPECT_NE(cmp.traces[0].error->find("offline"), std::string::npos);
  EXPECT_EQ(cmp.arms[1].run.repeats[0].records.size(), 1u);
  EXPECT_TRUE(cmp.arms[1].run.repeats[0].records[0].error);
}

}  // namespace
}  // namespace coe
