#include "coe/discrimination.hpp"

#include "coe/errors.hpp"
#include "coe/mock_backend.hpp"
#include "coe/parallel.hpp"
#include "coe/structured.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

constexpr std::string_view kYesNoReprompt = R"(Please output only "yes" or "no".)";

void require_text(std::string_view knowledge, std::string_view what, std::string_view value) {
  if (text::trim(knowledge).empty()) throw PreconditionError("external knowledge must be non-empty");
  if (text::trim(value).empty()) throw PreconditionError(std::string(what) + " must be non-empty");
}

// Call slots for one snippet: 0 = intent, then keywords, then relations.
std::size_t calls_per_snippet(const QuestionFeatures& f) {
  return 1 + f.keywords.size() + f.relations.size();
}

bool judge_slot(Gateway& gw, std::string_view knowledge, const QuestionFeatures& f, std::size_t slot) {
  if (slot == 0) return judge_intent(gw, knowledge, f.intent);
  slot -= 1;
  if (slot < f.keywords.size()) return judge_keyword(gw, knowledge, f.keywords[slot]);
  return judge_relation(gw, knowledge, f.relations[slot - f.keywords.size()]);
}

FeatureJudgment assemble(const std::string& id, const QuestionFeatures& f, const char* flags) {
  FeatureJudgment j;
  j.snippet_id = id;
  j.intent_covered = flags[0] != 0;
  for (std::size_t k = 0; k < f.keywords.size(); ++k) j.keyword_covered.push_back(flags[1 + k] != 0);
  for (std::size_t r = 0; r < f.relations.size(); ++r) {
    j.relation_covered.push_back(flags[1 + f.keywords.size() + r] != 0);
  }
  return j;
}

void require_valid(const QuestionFeatures& f) {
  auto v = validate_features(f);
  if (!v.empty()) throw PreconditionError("invalid features: " + v.front().describe());
}

}  // namespace

bool ask_yes_no(Gateway& gw, CompletionRequest req) {
  if (auto v = structured::parse_yes_no(gw.complete(req))) return *v;
  req.suffix = std::string(kYesNoReprompt);
  std::string second = gw.complete(req);
  if (auto v = structured::parse_yes_no(second)) return *v;
  throw UnparseableVerdictError("no yes/no verdict in response: \"" + second.substr(0, 120) + "\"");
}

bool judge_intent(Gateway& gw, std::string_view knowledge, std::string_view intent) {
  require_text(knowledge, "intent", intent);
  return ask_yes_no(gw, gw.request(templates::kIntentDiscrimination,
                                   {{"Intent", std::string(intent)},
                                    {"External Knowledge", std::string(knowledge)}}));
}

bool judge_keyword(Gateway& gw, std::string_view knowledge, std::string_view keyword) {
  require_text(knowledge, "keyword", keyword);
  return ask_yes_no(gw, gw.request(templates::kKeywordDiscrimination,
                                   {{"Keyword", std::string(keyword)},
                                    {"External Knowledge", std::string(knowledge)}}));
}

bool judge_relation(Gateway& gw, std::string_view knowledge, const Relation& relation) {
  require_text(knowledge, "relation description", relation.description);
  auto req = gw.request(templates::kRelationDiscrimination,
                        {{"Relation", relation.description},
                         {"External Knowledge", std::string(knowledge)}});
  req.annotations[std::string(kRelationKeywordsAnnotation)] = json(relation.keyword_pair).dump();
  return ask_yes_no(gw, std::move(req));
}

FeatureJudgment judge_snippet(Gateway& gw, const KnowledgeSnippet& snippet,
                              const QuestionFeatures& features) {
  require_valid(features);
  std::vector<char> flags(calls_per_snippet(features));
  try {
    for (std::size_t slot = 0; slot < flags.size(); ++slot) {
      flags[slot] = judge_slot(gw, snippet.text(), features, slot) ? 1 : 0;
    }
  } catch (const JudgeError&) {
    throw;
  } catch (const Error& e) {
    throw JudgeError(snippet.id(), e.what());
  }
  return assemble(snippet.id(), features, flags.data());
}

std::vector<FeatureJudgment> judge_matrix(Gateway& gw, std::span<const KnowledgeSnippet> snippets,
                                          const QuestionFeatures& features, int threads) {
  require_valid(features);
  const std::size_t per = calls_per_snippet(features);
  std::vector<char> flags(snippets.size() * per, 0);
  parallel::for_each_index(flags.size(), threads, [&](std::size_t cell) {
    const KnowledgeSnippet& s = snippets[cell / per];
    try {
      flags[cell] = judge_slot(gw, s.text(), features, cell % per) ? 1 : 0;
    } catch (const Error& e) {
      throw JudgeError(s.id(), e.what());
    }
  });
  std::vector<FeatureJudgment> out;
  out.reserve(snippets.size());
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    out.push_back(assemble(snippets[i].id(), features, flags.data() + i * per));
  }
  return out;
}

std::vector<FeatureJudgment> judge_matrix_serial(Gateway& gw,
                                                 std::span<const KnowledgeSnippet> snippets,
                                                 const QuestionFeatures& features) {
  std::vector<FeatureJudgment> out;
  out.reserve(snippets.size());
  for (const auto& s : snippets) out.push_back(judge_snippet(gw, s, features));
  return out;
}

std::string join_knowledge(std::span<const KnowledgeSnippet> snippets) {
  std::string out;
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    if (i) out += "\n\n";
    out += snippets[i].text();
  }
  return out;
}

CoEVerdict discriminate_coe(Gateway& gw, std::string_view knowledge, const QuestionFeatures& features) {
  require_valid(features);
  std::vector<char> flags(calls_per_snippet(features));
  for (std::size_t slot = 0; slot < flags.size(); ++slot) {
    flags[slot] = judge_slot(gw, knowledge, features, slot) ? 1 : 0;
  }
  return verdict_from_judgment(assemble("knowledge", features, flags.data()));
}

CoeDiscriminator make_discriminator(Gateway& gw) {
  return [&gw](std::string_view knowledge, const QuestionFeatures& f) {
    return discriminate_coe(gw, knowledge, f);
  };
}

}  // namespace coe
