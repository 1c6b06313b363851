#include "coe/mock_backend.hpp"

#include <algorithm>

#include "coe/errors.hpp"
#include "coe/prompts.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

const std::string& binding(const CompletionRequest& req, const std::string& name) {
  auto it = req.bindings.find(name);
  if (it == req.bindings.end()) throw BackendError("mock: request lacks binding " + name);
  return it->second;
}

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text::ifind(hay, needle); pos != std::string_view::npos;
       pos = text::ifind(hay, needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

void MockRules::add_samples(std::span<const QASample> samples) {
  for (const auto& s : samples) {
    extraction.emplace(s.question, s.features);
    if (answers.count(s.question)) continue;
    std::vector<std::string> cands{s.answer};
    if (auto it = phrases.find(s.answer); it != phrases.end()) cands.push_back(it->second);
    answers.emplace(s.question, std::move(cands));
  }
}

MockRules MockRules::from_json(const json& j) {
  MockRules r;
  if (j.contains("extraction")) {
    for (const auto& [q, f] : j["extraction"].items()) r.extraction[q] = f.get<QuestionFeatures>();
  }
  if (j.contains("intent_cues")) {
    r.intent_cues = j["intent_cues"].get<std::map<std::string, std::vector<std::string>>>();
  }
  if (j.contains("phrases")) r.phrases = j["phrases"].get<std::map<std::string, std::string>>();
  if (j.contains("answers")) {
    r.answers = j["answers"].get<std::map<std::string, std::vector<std::string>>>();
  }
  return r;
}

json MockRules::to_json() const {
  json ex = json::object();
  for (const auto& [q, f] : extraction) ex[q] = f;
  return json{{"extraction", ex},
              {"intent_cues", intent_cues},
              {"phrases", phrases},
              {"answers", answers}};
}

MockBackend::MockBackend(MockRules rules, std::string id)
    : rules_(std::move(rules)), id_(std::move(id)) {}

bool MockBackend::intent_covered(std::string_view knowledge, std::string_view intent) const {
  if (text::icontains(knowledge, intent)) return true;
  auto it = rules_.intent_cues.find(std::string(intent));
  if (it == rules_.intent_cues.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const std::string& cue) { return text::icontains(knowledge, cue); });
}

bool MockBackend::features_covered(std::string_view knowledge, const QuestionFeatures& f) const {
  if (!intent_covered(knowledge, f.intent)) return false;
  for (const auto& k : f.keywords) {
    if (!text::icontains(knowledge, k)) return false;
  }
  for (const auto& r : f.relations) {
    for (const auto& k : r.keyword_pair) {
      if (!text::icontains(knowledge, k)) return false;
    }
  }
  return true;
}

std::string MockBackend::answer(const CompletionRequest& req) const {
  static const std::string kUnknown = "I don't know.";
  const std::string& question = binding(req, "Question");
  const std::string& context = binding(req, "Context");
  auto f = rules_.extraction.find(question);
  auto cands = rules_.answers.find(question);
  if (f == rules_.extraction.end() || cands == rules_.answers.end()) return kUnknown;
  if (!features_covered(context, f->second)) return kUnknown;
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& c : cands->second) {
    std::size_t n = count_occurrences(context, c);
    if (n > best_count) {
      best = &c;
      best_count = n;
    }
  }
  return best ? *best : kUnknown;
}

std::string MockBackend::complete(const CompletionRequest& req, std::string_view) {
  using namespace templates;
  const std::string& t = req.template_name;
  auto yes_no = [](bool v) { return std::string(v ? "yes" : "no"); };

  if (t == kIntentKeywordExtraction) {
    auto it = rules_.extraction.find(binding(req, "Question"));
    if (it == rules_.extraction.end()) return R"({"Intent": "unknown", "Keywords": []})";
    return json{{"Intent", it->second.intent}, {"Keywords", it->second.keywords}}.dump();
  }
  if (t == kRelationExtraction) {
    auto it = rules_.extraction.find(binding(req, "Question"));
    json out = json::array();
    if (it != rules_.extraction.end()) {
      for (const auto& r : it->second.relations) {
        out.push_back(json{{"Keywords", r.keyword_pair}, {"Description", r.description}});
      }
    }
    return out.dump();
  }
  if (t == kIntentDiscrimination) {
    return yes_no(intent_covered(binding(req, "External Knowledge"), binding(req, "Intent")));
  }
  if (t == kKeywordDiscrimination) {
    return yes_no(text::icontains(binding(req, "External Knowledge"), binding(req, "Keyword")));
  }
  if (t == kRelationDiscrimination) {
    const std::string& knowledge = binding(req, "External Knowledge");
    auto pair = req.annotations.find(std::string(kRelationKeywordsAnnotation));
    if (pair == req.annotations.end()) {
      return yes_no(text::icontains(knowledge, binding(req, "Relation")));
    }
    auto keywords = json::parse(pair->second).get<std::vector<std::string>>();
    return yes_no(std::all_of(keywords.begin(), keywords.end(),
                              [&](const std::string& k) { return text::icontains(knowledge, k); }));
  }
  if (t == kAnswerGeneration || t == kKeywordGeneralization) {
    const std::string& phrase = binding(req, t == kAnswerGeneration ? "Correct Answer" : "Keyword");
    auto it = rules_.phrases.find(phrase);
    return it == rules_.phrases.end() ? "unknown" : it->second;
  }
  if (t == kMisinformationStatement) {
    static constexpr std::string_view kFrames[] = {
        "According to a widely shared report, the answer is %.",
        "Several secondary sources state that it was %.",
        "An archived summary gives % as the answer.",
        "Records cited in one overview point to %.",
        "A later account names % instead.",
    };
    std::size_t variant = std::stoul(binding(req, "Variant"));
    std::string frame(kFrames[variant % std::size(kFrames)]);
    std::string out = frame.substr(0, frame.find('%')) + binding(req, "Incorrect Answer") +
                      frame.substr(frame.find('%') + 1);
    if (variant >= std::size(kFrames)) out += " (" + std::to_string(variant) + ")";
    return out;
  }
  if (t == kQaAnswer) return answer(req);
  if (t == kConsistencyJudge) {
    return yes_no(text::icontains(binding(req, "Response"), binding(req, "Reference Answer")));
  }
  throw BackendError("mock: no rule for template " + t);
}

}  // namespace coe
