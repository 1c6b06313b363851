#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "coe/gateway.hpp"
#include "coe/model.hpp"

namespace coe {

// Rule tables for the offline backend.
struct MockRules {
  // Extraction responses keyed by exact question text.
  std::map<std::string, QuestionFeatures> extraction;
  // Extra phrases that also count as covering an intent (besides the intent
  // text itself).
  std::map<std::string, std::vector<std::string>> intent_cues;
  // Answer-generation and generalization responses keyed by input phrase.
  std::map<std::string, std::string> phrases;
  // Candidate answers the offline reader can give, keyed by question.
  std::map<std::string, std::vector<std::string>> answers;

  // Adds extraction rules and answer candidates (answer, then its generated
  // incorrect answer when a phrase rule exists) for each sample. Existing
  // entries win.
  void add_samples(std::span<const QASample> samples);

  static MockRules from_json(const json& j);
  json to_json() const;
};

// Deterministic stand-in for the extractor, the judges, the generators and
// the answering model. Dispatches on the request's template:
//   extraction      -> rule lookup by question, else {"Intent":"unknown","Keywords":[]} / []
//   discrimination  -> "yes" iff case-insensitive containment in the knowledge
//                      (intent text or cue; keyword; both relation keywords)
//   phrases         -> rule lookup, else "unknown"
//   qa_answer       -> the most frequent candidate answer in the context when
//                      the context covers the question's features, else
//                      "I don't know."
//   consistency     -> "yes" iff the reference occurs in the response
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockRules rules, std::string id = "mock");

  std::string id() const override { return id_; }
  bool deterministic() const override { return true; }
  std::string complete(const CompletionRequest& req, std::string_view rendered) override;

  const MockRules& rules() const { return rules_; }

  // The containment rules, exposed for tests.
  bool intent_covered(std::string_view knowledge, std::string_view intent) const;
  bool features_covered(std::string_view knowledge, const QuestionFeatures& f) const;

 private:
  std::string answer(const CompletionRequest& req) const;

  MockRules rules_;
  std::string id_;
};

// Annotation key carrying a relation's keyword pair (JSON array) to offline
// backends.
inline constexpr std::string_view kRelationKeywordsAnnotation = "Relation Keywords";

}  // namespace coe
