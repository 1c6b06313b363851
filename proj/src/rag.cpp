#include "coe/rag.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "coe/digest.hpp"
#include "coe/discrimination.hpp"
#include "coe/errors.hpp"
#include "coe/parallel.hpp"
#include "coe/perturbation.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%03zu", prefix, i);
  return buf;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kWords = {
      "a",    "an",   "the",  "of",   "in",    "on",   "at",   "to",    "for",  "by",
      "with", "and",  "or",   "is",   "are",   "was",  "were", "be",    "been", "did",
      "do",   "does", "what", "which", "who",  "whom", "whose", "when", "where", "how",
      "that", "this", "it",   "its",  "as",    "from", "s"};
  return kWords;
}

std::vector<std::string> ids_of(std::span<const KnowledgeSnippet> s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.id());
  return out;
}

}  // namespace

std::vector<KnowledgeSnippet> build_corpus(const QASample& sample,
                                           std::span<const SearchResult> retrieved) {
  std::vector<KnowledgeSnippet> corpus;
  std::set<std::string> seen;
  for (const auto& r : retrieved) {
    std::string body = text::trim(r.text);
    if (body.empty() || !seen.insert(normalized_digest(body)).second) continue;
    corpus.emplace_back(numbered("web", corpus.size()), std::move(body), Provenance::web);
  }
  std::size_t piece = 0;
  for (auto& sent : segment_sentences(sample.coe).sentences) {
    corpus.emplace_back(numbered("coe", piece++), std::move(sent), Provenance::coe_piece);
  }
  return corpus;
}

std::string corpus_digest(std::span<const KnowledgeSnippet> corpus) {
  std::string material;
  for (const auto& s : corpus) {
    material += s.id();
    material += '\x1f';
    material += to_string(s.provenance());
    material += '\x1f';
    material += s.text();
    material += '\x1e';
  }
  return sha256_hex(material);
}

std::vector<double> OverlapScorer::score(std::string_view question,
                                         std::span<const KnowledgeSnippet> snippets) {
  std::set<std::string> q;
  for (auto& t : text::tokenize(question)) {
    if (!stopwords().count(t)) q.insert(std::move(t));
  }
  std::vector<double> out;
  out.reserve(snippets.size());
  for (const auto& s : snippets) {
    if (q.empty()) {
      out.push_back(0.0);
      continue;
    }
    auto toks = text::tokenize(s.text());
    std::set<std::string> present(toks.begin(), toks.end());
    std::size_t hit = 0;
    for (const auto& t : q) hit += present.count(t);
    out.push_back(static_cast<double>(hit) / static_cast<double>(q.size()));
  }
  return out;
}

std::vector<KnowledgeSnippet> naive_rag_select(std::string_view question,
                                               std::span<const KnowledgeSnippet> corpus,
                                               std::size_t k, RelevanceScorer& scorer) {
  std::vector<double> scores = scorer.score(question, corpus);
  if (scores.size() != corpus.size()) {
    throw LengthMismatchError("scorer " + scorer.id() + " returned " + std::to_string(scores.size()) +
                              " scores for " + std::to_string(corpus.size()) + " snippets");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return corpus[a].id() < corpus[b].id();
  });
  order.resize(std::min(k, order.size()));
  std::vector<KnowledgeSnippet> out;
  for (std::size_t i : order) out.push_back(corpus[i]);
  return out;
}

ScopeSelection scopecoe_select(Gateway& judge, const QuestionFeatures& features,
                               std::span<const KnowledgeSnippet> corpus, int threads) {
  ScopeSelection out;
  out.judgments = judge_matrix(judge, corpus, features, threads);
  out.snippets = minimal_coverage_search(corpus, out.judgments);
  std::vector<std::string> ids = ids_of(out.snippets);
  out.report = coverage_of(ids, out.judgments,
                           FeatureShape{features.keywords.size(), features.relations.size()});
  return out;
}

RagComparison run_rag_comparison(std::span<const QASample> samples, Gateway& answerer,
                                 Gateway& judge, SearchClient& search, RelevanceScorer& scorer,
                                 const RagOptions& options) {
  if (samples.empty()) throw PreconditionError("rag comparison needs samples");
  RagComparison out;
  out.traces.resize(samples.size());
  std::vector<TrialInput> naive_in(samples.size());
  std::vector<TrialInput> scope_in(samples.size());

  // Per-sample retrieval and selection. The scorer may not be thread-safe, so
  // selection runs serially over samples; the judge matrix inside is parallel.
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const QASample& s = samples[i];
    RagSampleTrace& trace = out.traces[i];
    trace.sample_id = sample_id(s);
    for (auto* in : {&naive_in[i], &scope_in[i]}) {
      in->sample_id = trace.sample_id;
      in->question = s.question;
      in->reference = s.answer;
    }
    try {
      std::vector<SearchResult> hits;
      try {
        hits = search.search(s.question);
      } catch (const std::exception& e) {
        throw SearchError(s.question, e.what());
      }
      if (hits.size() > options.retrieve_limit) hits.resize(options.retrieve_limit);
      const auto corpus = build_corpus(s, hits);
      trace.corpus_size = corpus.size();
      if (options.run_naive) {
        trace.naive_corpus_digest = corpus_digest(corpus);
        auto picked = naive_rag_select(s.question, corpus, options.k, scorer);
        trace.naive_ids = ids_of(picked);
        naive_in[i].context = join_knowledge(picked);
      }
      if (options.run_scopecoe) {
        trace.scopecoe_corpus_digest = corpus_digest(corpus);
        auto sel = scopecoe_select(judge, s.features, corpus, options.threads);
        trace.scopecoe_ids = ids_of(sel.snippets);
        trace.coverage = sel.report;
        scope_in[i].context = join_knowledge(sel.snippets);
      }
    } catch (const std::exception& e) {
      trace.error = e.what();
      naive_in[i].error = scope_in[i].error = *trace.error;
    }
  }

  auto mean_size = [&](bool naive) {
    double sum = 0.0;
    for (const auto& t : out.traces) sum += static_cast<double>((naive ? t.naive_ids : t.scopecoe_ids).size());
    return sum / static_cast<double>(out.traces.size());
  };
  const Ratio zero{0, 1};
  if (options.run_naive) {
    out.arms.push_back(RagArm{Condition::rag,
                              run_condition(naive_in, Condition::rag, zero, answerer, judge,
                                            options.repeats, MetricKind::acc, options.threads),
                              mean_size(true)});
  }
  if (options.run_scopecoe) {
    out.arms.push_back(RagArm{Condition::rag_scopecoe,
                              run_condition(scope_in, Condition::rag_scopecoe, zero, answerer,
                                            judge, options.repeats, MetricKind::acc, options.threads),
                              mean_size(false)});
  }
  return out;
}

void to_json(json& j, const RagSampleTrace& t) {
  j = json{{"sample_id", t.sample_id},
           {"naive_corpus_digest", t.naive_corpus_digest},
           {"scopecoe_corpus_digest", t.scopecoe_corpus_digest},
           {"corpus_size", t.corpus_size},
           {"naive_ids", t.naive_ids},
           {"scopecoe_ids", t.scopecoe_ids}};
  if (t.coverage) j["coverage"] = *t.coverage;
  if (t.error) j["error"] = *t.error;
}

}  // namespace coe
