#include "coe/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <unistd.h>

#include "coe/digest.hpp"
#include "coe/errors.hpp"
#include "coe/text.hpp"

namespace coe {

std::vector<Violation> validate_features(const QuestionFeatures& f) {
  std::vector<Violation> out;
  if (text::trim(f.intent).empty()) out.push_back({"intent", "intent empty"});

  std::set<std::string> seen;
  for (std::size_t i = 0; i < f.keywords.size(); ++i) {
    const std::string field = "keywords[" + std::to_string(i) + "]";
    if (text::trim(f.keywords[i]).empty()) {
      out.push_back({field, "keyword empty"});
      continue;
    }
    if (!seen.insert(text::ascii_lower(f.keywords[i])).second) {
      out.push_back({field, "duplicate keyword"});
    }
  }

  for (std::size_t j = 0; j < f.relations.size(); ++j) {
    const Relation& r = f.relations[j];
    const std::string field = "relations[" + std::to_string(j) + "]";
    if (r.keyword_pair.size() != 2) {
      out.push_back({field, "relation keyword_pair must have exactly 2 elements"});
    }
    bool known = std::all_of(r.keyword_pair.begin(), r.keyword_pair.end(), [&](const auto& k) {
      return seen.count(text::ascii_lower(k)) > 0;
    });
    if (!known) out.push_back({field, "relation references unknown keyword"});
    if (text::trim(r.description).empty()) {
      out.push_back({field, "relation description empty"});
    } else if (mentions_foreign_keyword(r.description, r.keyword_pair, f.keywords)) {
      out.push_back({field, "relation description mentions keyword outside pair"});
    }
  }
  return out;
}

bool mentions_foreign_keyword(std::string_view description, std::span<const std::string> pair,
                              std::span<const std::string> keywords) {
  std::string masked = text::ascii_lower(description);
  for (const auto& p : pair) {
    if (p.empty()) continue;
    const std::string lp = text::ascii_lower(p);
    for (auto pos = masked.find(lp); pos != std::string::npos; pos = masked.find(lp, pos)) {
      std::fill(masked.begin() + pos, masked.begin() + pos + lp.size(), '\0');
      pos += lp.size();
    }
  }
  for (const auto& k : keywords) {
    bool in_pair = std::any_of(pair.begin(), pair.end(),
                               [&](const std::string& p) { return text::iequals(p, k); });
    if (in_pair || k.empty()) continue;
    if (masked.find(text::ascii_lower(k)) != std::string::npos) return true;
  }
  return false;
}

namespace {

constexpr std::pair<Provenance, std::string_view> kProvenanceNames[] = {
    {Provenance::coe_piece, "coe_piece"},
    {Provenance::irrelevant, "irrelevant"},
    {Provenance::misinformation, "misinformation"},
    {Provenance::web, "web"},
    {Provenance::other, "other"},
};

constexpr std::pair<Source, std::string_view> kSourceNames[] = {
    {Source::hotpotqa, "hotpotqa"},
    {Source::wikimultihop2, "wikimultihop2"},
    {Source::synthetic, "synthetic"},
};

constexpr std::pair<Condition, std::string_view> kConditionNames[] = {
    {Condition::coe, "CoE"},
    {Condition::senp, "SenP"},
    {Condition::wordp, "WordP"},
    {Condition::rag, "RAG"},
    {Condition::rag_scopecoe, "RAG+ScopeCoE"},
};

constexpr std::pair<MetricKind, std::string_view> kMetricNames[] = {
    {MetricKind::acc, "ACC"},
    {MetricKind::fr, "FR"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E v) {
  for (const auto& [e, n] : table) {
    if (e == v) return n;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_name(const std::pair<E, std::string_view> (&table)[N], std::string_view s,
             std::string_view what) {
  for (const auto& [e, n] : table) {
    if (text::iequals(n, s)) return e;
  }
  throw Error("unknown " + std::string(what) + " \"" + std::string(s) + "\"");
}

}  // namespace

std::string_view to_string(Provenance p) { return name_of(kProvenanceNames, p); }
Provenance provenance_from_string(std::string_view s) {
  return parse_name(kProvenanceNames, s, "provenance");
}
bool is_noise(Provenance p) {
  return p == Provenance::irrelevant || p == Provenance::misinformation;
}

std::string_view to_string(Source s) { return name_of(kSourceNames, s); }
Source source_from_string(std::string_view s) { return parse_name(kSourceNames, s, "source"); }
std::string_view to_string(Condition c) { return name_of(kConditionNames, c); }
Condition condition_from_string(std::string_view s) {
  return parse_name(kConditionNames, s, "condition");
}
std::string_view to_string(MetricKind m) { return name_of(kMetricNames, m); }
MetricKind metric_from_string(std::string_view s) { return parse_name(kMetricNames, s, "metric"); }

KnowledgeSnippet::KnowledgeSnippet(std::string id, std::string text, Provenance provenance)
    : id_(std::move(id)),
      text_(std::move(text)),
      provenance_(provenance),
      char_len_(text::utf8_length(text_)) {
  if (id_.empty()) throw PreconditionError("snippet id must be non-empty");
  if (text_.empty()) throw PreconditionError("snippet " + id_ + " has empty text");
}

void require_unique_ids(std::span<const KnowledgeSnippet> snippets) {
  std::set<std::string_view> ids;
  for (const auto& s : snippets) {
    if (!ids.insert(s.id()).second) throw PreconditionError("duplicate snippet id " + s.id());
  }
}

CoEVerdict CoEVerdict::from_missing(std::vector<std::string> missing) {
  CoEVerdict v;
  v.is_coe = missing.empty();
  v.missing_features = std::move(missing);
  return v;
}

CoEVerdict verdict_from_judgment(const FeatureJudgment& j) {
  std::vector<std::string> missing;
  if (!j.intent_covered) missing.emplace_back("intent");
  for (std::size_t i = 0; i < j.keyword_covered.size(); ++i) {
    if (!j.keyword_covered[i]) missing.push_back("keyword[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < j.relation_covered.size(); ++i) {
    if (!j.relation_covered[i]) missing.push_back("relation[" + std::to_string(i) + "]");
  }
  return CoEVerdict::from_missing(std::move(missing));
}

std::vector<Violation> validate_sample(const QASample& s) {
  std::vector<Violation> out;
  if (text::trim(s.question).empty()) out.push_back({"question", "question empty"});
  if (text::trim(s.answer).empty()) out.push_back({"answer", "answer empty"});
  if (text::trim(s.coe).empty()) out.push_back({"coe", "coe empty"});
  if (s.senp && *s.senp == s.coe) out.push_back({"senp", "senp equals coe"});
  if (s.wordp && *s.wordp == s.coe) out.push_back({"wordp", "wordp equals coe"});
  for (auto v : validate_features(s.features)) {
    v.field = "features." + v.field;
    out.push_back(std::move(v));
  }
  return out;
}

std::string sample_id(const QASample& s) {
  if (auto it = s.seed_metadata.find("id"); it != s.seed_metadata.end() && !it->second.empty()) {
    return it->second;
  }
  return "q-" + sha256_hex(s.question).substr(0, 12);
}

Ratio Ratio::of(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) throw PreconditionError("ratio must be non-negative with positive denominator");
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  return Ratio{num / g, den / g};
}

Ratio Ratio::from_double(double v, std::int64_t den) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("ratio must be finite and >= 0");
  return of(static_cast<std::int64_t>(std::llround(v * static_cast<double>(den))), den);
}

bool Ratio::within(const Ratio& other, const Ratio& tol) const {
  // |a/b - c/d| <= e/f  <=>  |a*d - c*b| * f <= e * b * d
  __int128 diff = static_cast<__int128>(num) * other.den - static_cast<__int128>(other.num) * den;
  if (diff < 0) diff = -diff;
  return diff * tol.den <= static_cast<__int128>(tol.num) * den * other.den;
}

bool Ratio::operator<(const Ratio& o) const {
  return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string format_ratio(const Ratio& r) {
  std::ostringstream os;
  os << r.value();
  return os.str();
}

Ratio noise_ratio(std::span<const KnowledgeSnippet> snippets) {
  std::int64_t noise = 0;
  std::int64_t total = 0;
  for (const auto& s : snippets) {
    total += static_cast<std::int64_t>(s.char_len());
    if (is_noise(s.provenance())) noise += static_cast<std::int64_t>(s.char_len());
  }
  if (total == 0) return Ratio{0, 1};
  return Ratio::of(noise, total);
}

std::vector<Violation> validate_mixed_context(const MixedContext& m) {
  std::vector<Violation> out;
  if (!(noise_ratio(m.snippets) == m.achieved_ratio)) {
    out.push_back({"achieved_ratio", "achieved_ratio differs from recomputed noise ratio"});
  }
  if (m.target_ratio.num == 0) {
    if (m.achieved_ratio.num != 0) out.push_back({"achieved_ratio", "target 0 requires achieved 0"});
  } else if (!m.achieved_ratio.within(m.target_ratio, m.tolerance)) {
    out.push_back({"achieved_ratio", "achieved_ratio outside tolerance of target"});
  }
  return out;
}

TrialReport make_trial_report(Condition condition, std::string model, Ratio ratio, int repeat,
                              MetricKind metric, std::vector<TrialRecord> records) {
  if (records.empty()) throw PreconditionError("trial report needs at least one record");
  TrialReport r;
  r.condition = condition;
  r.model = std::move(model);
  r.ratio = ratio;
  r.repeat = repeat;
  r.metric = metric;
  std::size_t hits = std::count_if(records.begin(), records.end(),
                                   [](const TrialRecord& t) { return t.verdict; });
  r.aggregate = static_cast<double>(hits) / static_cast<double>(records.size());
  r.records = std::move(records);
  return r;
}

// ---- JSON ---------------------------------------------------------------

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw Error("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw Error(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::vector<bool> bool_array(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw Error(std::string("field \"") + key + "\" must be an array");
  std::vector<bool> out;
  for (const auto& b : v) {
    if (!b.is_boolean()) throw Error(std::string("field \"") + key + "\" must hold booleans");
    out.push_back(b.get<bool>());
  }
  return out;
}

std::vector<std::string> string_array(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw Error(std::string("field \"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw Error(std::string("field \"") + key + "\" must hold strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

void to_json(json& j, const Relation& r) {
  j = json{{"keywords", r.keyword_pair}, {"description", r.description}};
}
void from_json(const json& j, Relation& r) {
  r.keyword_pair = string_array(j, "keywords");
  r.description = string_field(j, "description");
}

void to_json(json& j, const QuestionFeatures& f) {
  j = json{{"intent", f.intent}, {"keywords", f.keywords}, {"relations", f.relations}};
}
void from_json(const json& j, QuestionFeatures& f) {
  f.intent = string_field(j, "intent");
  f.keywords = string_array(j, "keywords");
  f.relations.clear();
  const json& rel = field(j, "relations");
  if (!rel.is_array()) throw Error("field \"relations\" must be an array");
  for (const auto& r : rel) f.relations.push_back(r.get<Relation>());
}

void to_json(json& j, const KnowledgeSnippet& s) {
  j = json{{"id", s.id()},
           {"text", s.text()},
           {"provenance", std::string(to_string(s.provenance()))},
           {"char_len", s.char_len()}};
}
KnowledgeSnippet snippet_from_json(const json& j) {
  Provenance p = Provenance::other;
  if (j.contains("provenance")) p = provenance_from_string(string_field(j, "provenance"));
  KnowledgeSnippet s(string_field(j, "id"), string_field(j, "text"), p);
  if (j.contains("char_len") && j["char_len"].get<std::size_t>() != s.char_len()) {
    throw Error("snippet " + s.id() + ": char_len does not match text");
  }
  return s;
}

void to_json(json& j, const FeatureJudgment& fj) {
  j = json{{"snippet_id", fj.snippet_id},
           {"intent", fj.intent_covered},
           {"keywords", fj.keyword_covered},
           {"relations", fj.relation_covered}};
}
void from_json(const json& j, FeatureJudgment& fj) {
  fj.snippet_id = string_field(j, "snippet_id");
  const json& intent = field(j, "intent");
  if (!intent.is_boolean()) throw Error("field \"intent\" must be a boolean");
  fj.intent_covered = intent.get<bool>();
  fj.keyword_covered = bool_array(j, "keywords");
  fj.relation_covered = bool_array(j, "relations");
}

void to_json(json& j, const CoEVerdict& v) {
  j = json{{"is_coe", v.is_coe}, {"missing_features", v.missing_features}};
}
void from_json(const json& j, CoEVerdict& v) {
  v = CoEVerdict::from_missing(string_array(j, "missing_features"));
  if (j.contains("is_coe") && j["is_coe"].get<bool>() != v.is_coe) {
    throw Error("is_coe inconsistent with missing_features");
  }
}

void to_json(json& j, const QASample& s) {
  j = json{{"question", s.question},
           {"answer", s.answer},
           {"coe", s.coe},
           {"features", s.features},
           {"source", std::string(to_string(s.source))}};
  if (s.senp) j["senp"] = *s.senp;
  if (s.wordp) j["wordp"] = *s.wordp;
  if (!s.seed_metadata.empty()) j["seed_metadata"] = s.seed_metadata;
}
void from_json(const json& j, QASample& s) {
  s.question = string_field(j, "question");
  s.answer = string_field(j, "answer");
  s.coe = string_field(j, "coe");
  s.senp.reset();
  s.wordp.reset();
  if (j.contains("senp") && !j["senp"].is_null()) s.senp = string_field(j, "senp");
  if (j.contains("wordp") && !j["wordp"].is_null()) s.wordp = string_field(j, "wordp");
  s.features = field(j, "features").get<QuestionFeatures>();
  s.source = j.contains("source") ? source_from_string(string_field(j, "source")) : Source::synthetic;
  s.seed_metadata.clear();
  if (j.contains("seed_metadata")) {
    for (const auto& [k, v] : j["seed_metadata"].items()) {
      s.seed_metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
}

void to_json(json& j, const Ratio& r) { j = json::array({r.num, r.den}); }
void from_json(const json& j, Ratio& r) {
  if (j.is_number()) {
    r = Ratio::from_double(j.get<double>());
    return;
  }
  if (!j.is_array() || j.size() != 2) throw Error("ratio must be [num, den] or a number");
  r = Ratio::of(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
}

void to_json(json& j, const MixedContext& m) {
  j = json{{"snippets", m.snippets},
           {"target_ratio", m.target_ratio},
           {"achieved_ratio", m.achieved_ratio},
           {"tolerance", m.tolerance},
           {"rng_seed", m.rng_seed}};
}
MixedContext mixed_context_from_json(const json& j) {
  MixedContext m;
  for (const auto& s : field(j, "snippets")) m.snippets.push_back(snippet_from_json(s));
  m.target_ratio = field(j, "target_ratio").get<Ratio>();
  m.achieved_ratio = field(j, "achieved_ratio").get<Ratio>();
  if (j.contains("tolerance")) m.tolerance = j["tolerance"].get<Ratio>();
  m.rng_seed = field(j, "rng_seed").get<std::uint64_t>();
  return m;
}

void to_json(json& j, const TrialRecord& r) {
  j = json{{"sample_id", r.sample_id}, {"output", r.output}, {"judge", r.verdict}};
  if (r.error) j["error"] = *r.error;
}
void from_json(const json& j, TrialRecord& r) {
  r.sample_id = string_field(j, "sample_id");
  r.output = string_field(j, "output");
  r.verdict = field(j, "judge").get<bool>();
  r.error.reset();
  if (j.contains("error") && !j["error"].is_null()) r.error = string_field(j, "error");
}

void to_json(json& j, const TrialReport& r) {
  j = json{{"condition", std::string(to_string(r.condition))},
           {"model", r.model},
           {"ratio", r.ratio},
           {"repeat", r.repeat},
           {"metric", std::string(to_string(r.metric))},
           {"records", r.records},
           {"aggregate", r.aggregate}};
}
void from_json(const json& j, TrialReport& r) {
  std::vector<TrialRecord> records;
  for (const auto& rec : field(j, "records")) records.push_back(rec.get<TrialRecord>());
  r = make_trial_report(condition_from_string(string_field(j, "condition")),
                        string_field(j, "model"), field(j, "ratio").get<Ratio>(),
                        field(j, "repeat").get<int>(), metric_from_string(string_field(j, "metric")),
                        std::move(records));
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::string& path, std::span<const json> records) {
  std::string buf;
  for (const auto& r : records) {
    buf += r.dump();
    buf.push_back('\n');
  }
  write_file_atomic(path, buf);
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  static std::atomic<std::uint64_t> counter{0};
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace coe
