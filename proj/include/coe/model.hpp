#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

// Domain types shared by every stage of the pipeline. Values are plain data;
// the only behavior here is construction-time checking, validation and the
// JSON line format used on disk.
namespace coe {

using json = nlohmann::json;

struct Relation {
  std::vector<std::string> keyword_pair;  // exactly two when valid
  std::string description;

  bool operator==(const Relation&) const = default;
};

// The CoE feature template of one question.
struct QuestionFeatures {
  std::string intent;
  std::vector<std::string> keywords;
  std::vector<Relation> relations;

  bool operator==(const QuestionFeatures&) const = default;
};

struct Violation {
  std::string field;  // e.g. "intent", "keywords[2]", "relations[0]"
  std::string rule;   // e.g. "intent empty"

  std::string describe() const { return field + ": " + rule; }
  bool operator==(const Violation&) const = default;
};

// Empty iff every QuestionFeatures / Relation invariant holds. Keyword identity
// is case-insensitive exact comparison.
std::vector<Violation> validate_features(const QuestionFeatures& f);

// Whether `description` mentions any keyword of `keywords` other than the two
// in `pair`. Occurrences that lie inside a mention of a pair keyword don't count.
bool mentions_foreign_keyword(std::string_view description,
                              std::span<const std::string> pair,
                              std::span<const std::string> keywords);

enum class Provenance { coe_piece, irrelevant, misinformation, web, other };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

// Injected noise (irrelevant text or misinformation) as opposed to the core
// knowledge a context is built around.
bool is_noise(Provenance p);

class KnowledgeSnippet {
 public:
  KnowledgeSnippet(std::string id, std::string text, Provenance provenance);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  Provenance provenance() const { return provenance_; }
  // Unicode scalar values, not bytes.
  std::size_t char_len() const { return char_len_; }

  bool operator==(const KnowledgeSnippet&) const = default;

 private:
  std::string id_;
  std::string text_;
  Provenance provenance_;
  std::size_t char_len_;
};

// Throws PreconditionError on a duplicate id.
void require_unique_ids(std::span<const KnowledgeSnippet> snippets);

struct FeatureJudgment {
  std::string snippet_id;
  bool intent_covered = false;
  std::vector<bool> keyword_covered;   // aligned to QuestionFeatures::keywords
  std::vector<bool> relation_covered;  // aligned to QuestionFeatures::relations

  bool operator==(const FeatureJudgment&) const = default;
};

struct CoEVerdict {
  bool is_coe = true;
  std::vector<std::string> missing_features;  // "intent", "keyword[i]", "relation[j]"

  static CoEVerdict from_missing(std::vector<std::string> missing);
  bool operator==(const CoEVerdict&) const = default;
};

// is_coe <=> every flag of the judgment is set.
CoEVerdict verdict_from_judgment(const FeatureJudgment& j);

enum class Source { hotpotqa, wikimultihop2, synthetic };

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);

// <Question, Answer, CoE, SenP, WordP> plus the question's features.
struct QASample {
  std::string question;
  std::string answer;
  std::string coe;
  std::optional<std::string> senp;
  std::optional<std::string> wordp;
  QuestionFeatures features;
  Source source = Source::synthetic;
  std::map<std::string, std::string> seed_metadata;

  bool operator==(const QASample&) const = default;
};

std::vector<Violation> validate_sample(const QASample& s);

// seed_metadata["id"] when present, otherwise a digest of the question.
std::string sample_id(const QASample& s);

// Exact non-negative fraction. Used for noise ratios so the tolerance check
// never sees floating-point drift.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Ratio of(std::int64_t num, std::int64_t den);
  // Nearest fraction with the given denominator, reduced.
  static Ratio from_double(double v, std::int64_t den = 10000);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // |*this - other| <= tol, in exact arithmetic.
  bool within(const Ratio& other, const Ratio& tol) const;

  bool operator==(const Ratio& o) const { return num == o.num && den == o.den; }
  bool operator<(const Ratio& o) const;
};

std::string format_ratio(const Ratio& r);  // decimal, e.g. "0.25"

// Default mixing tolerance.
inline constexpr Ratio kMixTolerance{1, 20};

struct MixedContext {
  std::vector<KnowledgeSnippet> snippets;
  Ratio target_ratio;
  Ratio achieved_ratio;
  Ratio tolerance = kMixTolerance;
  std::uint64_t rng_seed = 0;

  bool operator==(const MixedContext&) const = default;
};

// Noise characters over all characters; 0 for an empty list.
Ratio noise_ratio(std::span<const KnowledgeSnippet> snippets);

std::vector<Violation> validate_mixed_context(const MixedContext& m);

enum class Condition { coe, senp, wordp, rag, rag_scopecoe };
enum class MetricKind { acc, fr };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);
std::string_view to_string(MetricKind m);
MetricKind metric_from_string(std::string_view s);

struct TrialRecord {
  std::string sample_id;
  std::string output;
  bool verdict = false;
  std::optional<std::string> error;

  bool operator==(const TrialRecord&) const = default;
};

struct TrialReport {
  Condition condition = Condition::coe;
  std::string model;
  Ratio ratio;
  int repeat = 0;
  MetricKind metric = MetricKind::acc;
  std::vector<TrialRecord> records;
  double aggregate = 0.0;

  bool operator==(const TrialReport&) const = default;
};

// Builds a report and computes aggregate = true verdicts / records.
// Throws PreconditionError when records is empty.
TrialReport make_trial_report(Condition condition, std::string model, Ratio ratio, int repeat,
                              MetricKind metric, std::vector<TrialRecord> records);

// JSON line format. Every decode validates shape and throws coe::Error on
// missing or mistyped fields.
void to_json(json& j, const Relation& r);
void from_json(const json& j, Relation& r);
void to_json(json& j, const QuestionFeatures& f);
void from_json(const json& j, QuestionFeatures& f);
void to_json(json& j, const KnowledgeSnippet& s);
KnowledgeSnippet snippet_from_json(const json& j);
void to_json(json& j, const FeatureJudgment& fj);
void from_json(const json& j, FeatureJudgment& fj);
void to_json(json& j, const CoEVerdict& v);
void from_json(const json& j, CoEVerdict& v);
void to_json(json& j, const QASample& s);
void from_json(const json& j, QASample& s);
void to_json(json& j, const Ratio& r);
void from_json(const json& j, Ratio& r);
void to_json(json& j, const MixedContext& m);
MixedContext mixed_context_from_json(const json& j);
void to_json(json& j, const TrialRecord& r);
void from_json(const json& j, TrialRecord& r);
void to_json(json& j, const TrialReport& r);
void from_json(const json& j, TrialReport& r);

// One JSON object per line. Blank lines are skipped on read.
std::vector<json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, std::span<const json> records);

// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace coe
