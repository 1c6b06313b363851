#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coe/gateway.hpp"
#include "coe/model.hpp"

namespace coe {

// Sends a yes/no request; an unparseable reply is retried once with an
// instruction to answer only "yes" or "no", then UnparseableVerdictError.
bool ask_yes_no(Gateway& gw, CompletionRequest req);

bool judge_intent(Gateway& gw, std::string_view knowledge, std::string_view intent);
bool judge_keyword(Gateway& gw, std::string_view knowledge, std::string_view keyword);
// The prompt carries only the description; the pair rides along as an
// annotation for offline backends.
bool judge_relation(Gateway& gw, std::string_view knowledge, const Relation& relation);

// One intent call, one call per keyword, one per relation. Flags are stored by
// position. Judge failures are rethrown as JudgeError carrying the snippet id.
FeatureJudgment judge_snippet(Gateway& gw, const KnowledgeSnippet& snippet,
                              const QuestionFeatures& features);

// Judgments for every snippet, in input order. The OpenMP version spreads the
// snippet x feature calls over `threads` workers; the serial one is the
// reference it is tested against.
std::vector<FeatureJudgment> judge_matrix(Gateway& gw, std::span<const KnowledgeSnippet> snippets,
                                          const QuestionFeatures& features, int threads);
std::vector<FeatureJudgment> judge_matrix_serial(Gateway& gw,
                                                 std::span<const KnowledgeSnippet> snippets,
                                                 const QuestionFeatures& features);

// Snippet texts joined with blank lines, in order.
std::string join_knowledge(std::span<const KnowledgeSnippet> snippets);

// Judges the whole knowledge as one premise.
CoEVerdict discriminate_coe(Gateway& gw, std::string_view knowledge, const QuestionFeatures& features);

using CoeDiscriminator = std::function<CoEVerdict(std::string_view, const QuestionFeatures&)>;

CoeDiscriminator make_discriminator(Gateway& gw);

}  // namespace coe
