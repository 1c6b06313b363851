#include "coe/extraction.hpp"

#include <algorithm>
#include <set>

#include "coe/errors.hpp"
#include "coe/structured.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

constexpr std::string_view kObjectReprompt =
    "Output only the JSON object in the format of the examples, with no other text.";
constexpr std::string_view kArrayReprompt =
    "Output only the JSON array in the format of the examples, with no other text.";

// Looks a key up case-insensitively so "intent" and "Intent" both work.
const json* find_key(const json& obj, std::string_view key) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (text::iequals(it.key(), key)) return &it.value();
  }
  return nullptr;
}

std::optional<IntentKeywords> parse_intent_keywords(std::string_view raw) {
  auto doc = structured::find_json(raw);
  if (!doc || !doc->is_object()) return std::nullopt;
  const json* intent = find_key(*doc, "Intent");
  const json* keywords = find_key(*doc, "Keywords");
  if (!intent || !intent->is_string() || !keywords || !keywords->is_array()) return std::nullopt;
  IntentKeywords out;
  out.intent = text::trim(intent->get<std::string>());
  for (const auto& k : *keywords) {
    if (!k.is_string()) return std::nullopt;
    out.keywords.push_back(k.get<std::string>());
  }
  return out;
}

std::optional<json> parse_relation_array(std::string_view raw) {
  auto doc = structured::find_json(raw);
  if (!doc || !doc->is_array()) return std::nullopt;
  return doc;
}

void warn(std::vector<std::string>* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

// Maps each pair entry to its surface form in `keywords`; false if any entry
// is not a keyword.
bool canonicalize_pair(std::vector<std::string>& pair, std::span<const std::string> keywords) {
  for (auto& p : pair) {
    auto it = std::find_if(keywords.begin(), keywords.end(),
                           [&](const std::string& k) { return text::iequals(text::trim(p), k); });
    if (it == keywords.end()) return false;
    p = *it;
  }
  return true;
}

std::optional<std::string> relation_problem(const Relation& r, std::span<const std::string> keywords) {
  if (r.keyword_pair.size() != 2) return "keyword pair must have exactly 2 elements";
  if (text::trim(r.description).empty()) return "empty description";
  if (mentions_foreign_keyword(r.description, r.keyword_pair, keywords)) {
    return "description mentions a keyword outside its pair";
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> dedupe_keywords(std::span<const std::string> keywords) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& k : keywords) {
    std::string t = text::trim(k);
    if (t.empty()) continue;
    if (seen.insert(text::ascii_lower(t)).second) out.push_back(std::move(t));
  }
  return out;
}

IntentKeywords extract_intent_keywords(Gateway& gw, std::string_view question) {
  if (text::trim(question).empty()) throw PreconditionError("question must be non-empty");
  auto req = gw.request(templates::kIntentKeywordExtraction, {{"Question", std::string(question)}});
  auto parsed = parse_intent_keywords(gw.complete(req));
  if (!parsed) {
    req.suffix = std::string(kObjectReprompt);
    parsed = parse_intent_keywords(gw.complete(req));
  }
  if (!parsed) {
    throw MalformedResponseError("intent/keyword extraction returned no usable JSON object for: " +
                                 std::string(question));
  }
  parsed->keywords = dedupe_keywords(parsed->keywords);
  return *parsed;
}

std::vector<Relation> extract_relations(Gateway& gw, std::string_view question,
                                        std::span<const std::string> keywords,
                                        std::vector<std::string>* warnings) {
  if (keywords.empty()) throw PreconditionError("relation extraction needs at least one keyword");
  std::vector<std::string> kw(keywords.begin(), keywords.end());
  auto req = gw.request(templates::kRelationExtraction,
                        {{"Question", std::string(question)}, {"Keywords", format_keyword_list(kw)}});
  auto parsed = parse_relation_array(gw.complete(req));
  if (!parsed) {
    req.suffix = std::string(kArrayReprompt);
    parsed = parse_relation_array(gw.complete(req));
  }
  if (!parsed) {
    throw MalformedResponseError("relation extraction returned no usable JSON array for: " +
                                 std::string(question));
  }

  std::vector<Relation> out;
  for (std::size_t i = 0; i < parsed->size(); ++i) {
    const json& item = (*parsed)[i];
    const json* pair = item.is_object() ? find_key(item, "Keywords") : nullptr;
    const json* desc = item.is_object() ? find_key(item, "Description") : nullptr;
    if (!pair || !pair->is_array() || !desc || !desc->is_string()) {
      warn(warnings, "relation " + std::to_string(i) + " dropped: malformed entry " + item.dump());
      continue;
    }
    Relation r;
    bool strings = std::all_of(pair->begin(), pair->end(), [](const json& v) { return v.is_string(); });
    if (!strings) {
      warn(warnings, "relation " + std::to_string(i) + " dropped: non-string keyword");
      continue;
    }
    r.keyword_pair = pair->get<std::vector<std::string>>();
    r.description = text::trim(desc->get<std::string>());
    if (!canonicalize_pair(r.keyword_pair, kw)) {
      warn(warnings, "relation " + std::to_string(i) + " dropped: references a non-keyword");
      continue;
    }
    if (auto problem = relation_problem(r, kw)) {
      warn(warnings, "relation " + std::to_string(i) + " dropped: " + *problem);
      continue;
    }
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
  }
  return out;
}

QuestionFeatures normalize_features(QuestionFeatures f, std::vector<std::string>* warnings) {
  f.intent = text::trim(f.intent);
  f.keywords = dedupe_keywords(f.keywords);
  std::vector<Relation> kept;
  for (std::size_t i = 0; i < f.relations.size(); ++i) {
    Relation r = f.relations[i];
    r.description = text::trim(r.description);
    if (!canonicalize_pair(r.keyword_pair, f.keywords)) {
      warn(warnings, "relation " + std::to_string(i) + " dropped: references a non-keyword");
      continue;
    }
    if (auto problem = relation_problem(r, f.keywords)) {
      warn(warnings, "relation " + std::to_string(i) + " dropped: " + *problem);
      continue;
    }
    kept.push_back(std::move(r));
  }
  f.relations = std::move(kept);
  return f;
}

QuestionFeatures extract_question_features(Gateway& gw, std::string_view question,
                                           std::vector<std::string>* warnings) {
  IntentKeywords ik = extract_intent_keywords(gw, question);
  QuestionFeatures f;
  f.intent = std::move(ik.intent);
  f.keywords = std::move(ik.keywords);
  if (!f.keywords.empty()) f.relations = extract_relations(gw, question, f.keywords, warnings);
  f = normalize_features(std::move(f), warnings);
  auto violations = validate_features(f);
  if (!violations.empty()) {
    std::vector<std::string> msgs;
    for (const auto& v : violations) msgs.push_back(v.describe());
    throw ValidationError("extracted features for \"" + std::string(question) +
                              "\" are invalid: " + text::join(msgs, "; "),
                          std::move(msgs));
  }
  return f;
}

}  // namespace coe
