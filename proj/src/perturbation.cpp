#include "coe/perturbation.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <regex>

#include "coe/errors.hpp"
#include "coe/random.hpp"
#include "coe/structured.hpp"

namespace coe {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Word immediately before position `dot`, without leading punctuation.
std::string_view token_before(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(s[b - 1])) --b;
  std::string_view tok = s.substr(b, dot - b);
  while (!tok.empty() && (tok.front() == '(' || tok.front() == '"' || tok.front() == '\'')) {
    tok.remove_prefix(1);
  }
  return tok;
}

bool ends_abbreviation(std::string_view s, std::size_t dot, const SegmentOptions& o) {
  std::string_view tok = token_before(s, dot);
  if (tok.empty()) return false;
  if (o.guard_single_letter && tok.size() == 1 && std::isupper(static_cast<unsigned char>(tok[0]))) {
    return true;
  }
  return std::any_of(o.abbreviations.begin(), o.abbreviations.end(),
                     [&](const std::string& a) { return tok == a; });
}

std::string join_kept(const std::vector<std::string>& sentences, const std::vector<char>& removed) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!removed[i]) kept.push_back(sentences[i]);
  }
  return text::join(kept, " ");
}

const std::regex& month_day_year() {
  static const std::regex r(
      R"(^(January|February|March|April|May|June|July|August|September|October|November|December|Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec)\.? \d{1,2}, \d{1,4}$)");
  return r;
}

struct FormatRule {
  const char* name;
  std::regex pattern;
};

const std::vector<FormatRule>& format_rules() {
  static const std::string kMonth =
      "(January|February|March|April|May|June|July|August|September|October|November|December|Jan|"
      "Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec)";
  static const std::vector<FormatRule> kRules = {
      {"month-day-year", month_day_year()},
      {"day-month-year", std::regex("^\\d{1,2} " + kMonth + "\\.? \\d{1,4}$")},
      {"month-year", std::regex("^" + kMonth + "\\.? \\d{1,4}$")},
      {"iso-date", std::regex(R"(^\d{4}-\d{2}-\d{2}$)")},
      {"year", std::regex(R"(^\d{4}$)")},
      {"separated-number", std::regex(R"(^\d{1,3}(,\d{3})+(\.\d+)?$)")},
  };
  return kRules;
}

}  // namespace

std::vector<std::string> SegmentOptions::default_abbreviations() {
  return {"Mr",   "Mrs",  "Ms",   "Dr",   "Prof", "Sr",  "Jr",  "St",  "Mt",   "Ft",  "Gen",
          "Col",  "Lt",   "Sgt",  "Capt", "Gov",  "Sen", "Rep", "Rev", "Hon",  "Inc", "Ltd",
          "Co",   "Corp", "Bros", "vs",   "No",   "Vol", "Jan", "Feb", "Mar",  "Apr", "Jun",
          "Jul",  "Aug",  "Sep",  "Sept", "Oct",  "Nov", "Dec", "U.S", "U.K",  "U.N", "e.g",
          "i.e",  "a.m",  "p.m",  "approx", "ca", "cf",  "Ave", "Blvd", "Mass", "Calif"};
}

std::string SentenceSplit::join() const {
  std::string out = leading;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out += sentences[i];
    out += separators[i];
  }
  return out;
}

SentenceSplit segment_sentences(std::string_view s, const SegmentOptions& options) {
  SentenceSplit out;
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  out.leading = std::string(s.substr(0, i));
  std::size_t start = i;

  auto emit = [&](std::size_t end, std::size_t next) {
    out.sentences.emplace_back(s.substr(start, end - start));
    out.separators.emplace_back(s.substr(end, next - end));
    start = next;
  };

  while (i < s.size()) {
    if (!is_terminator(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_terminator(s[j])) ++j;
    const bool lone_period = (j - i == 1 && s[i] == '.');
    while (j < s.size() && is_closer(s[j])) ++j;
    if (j < s.size() && !is_space(s[j])) {
      i = j;
      continue;
    }
    if (lone_period && ends_abbreviation(s, i, options)) {
      i = j;
      continue;
    }
    std::size_t next = j;
    while (next < s.size() && is_space(s[next])) ++next;
    emit(j, next);
    i = next;
  }
  if (start < s.size()) {
    std::size_t end = s.size();
    while (end > start && is_space(s[end - 1])) --end;
    emit(end, s.size());
  }
  return out;
}

SenpResult senp(const QASample& sample, const CoeDiscriminator& discriminate,
                const SegmentOptions& options) {
  if (!discriminate(sample.coe, sample.features).is_coe) {
    throw PreconditionError("senp requires a CoE sample; " + sample_id(sample) + " is not");
  }
  SentenceSplit split = segment_sentences(sample.coe, options);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < split.sentences.size(); ++i) {
    const std::string& sent = split.sentences[i];
    bool has_keyword = std::any_of(sample.features.keywords.begin(), sample.features.keywords.end(),
                                   [&](const std::string& k) { return text::icontains(sent, k); });
    if (has_keyword && !text::icontains(sent, sample.answer)) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw NoCandidatesError("no sentence of " + sample_id(sample) +
                            " mentions a keyword without the answer");
  }

  auto attempt = [&](const std::vector<char>& removed) -> std::optional<SenpResult> {
    std::string remainder = join_kept(split.sentences, removed);
    if (remainder.empty()) return std::nullopt;
    if (discriminate(remainder, sample.features).is_coe) return std::nullopt;
    SenpResult r;
    r.text = std::move(remainder);
    r.sentences = split.sentences;
    for (std::size_t i = 0; i < removed.size(); ++i) {
      if (removed[i]) r.removed.push_back(i);
    }
    return r;
  };

  for (std::size_t c : candidates) {
    std::vector<char> removed(split.sentences.size(), 0);
    removed[c] = 1;
    if (auto r = attempt(removed)) return *r;
  }
  std::vector<char> removed(split.sentences.size(), 0);
  removed[candidates[0]] = 1;
  for (std::size_t n = 1; n < candidates.size(); ++n) {
    removed[candidates[n]] = 1;
    if (auto r = attempt(removed)) return *r;
  }
  throw NeverBreaksError("removing every candidate sentence of " + sample_id(sample) +
                         " still leaves a CoE");
}

WordpResult wordp(Gateway& gw, const QASample& sample, std::uint64_t rng_seed,
                  const CoeDiscriminator& discriminate) {
  const auto& keywords = sample.features.keywords;
  if (keywords.empty()) throw PreconditionError("wordp needs at least one keyword");
  std::vector<std::size_t> order(keywords.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(std::span<std::size_t>(order));

  for (std::size_t idx : order) {
    const std::string& keyword = keywords[idx];
    auto req = gw.request(templates::kKeywordGeneralization, {{"Keyword", keyword}});
    std::string hypernym = structured::parse_phrase(gw.complete(req));
    if (hypernym.empty() || text::iequals(hypernym, keyword)) continue;
    auto replaced = text::ireplace_all(sample.coe, keyword, hypernym);
    if (replaced.count == 0) continue;  // text unchanged, still a CoE
    if (discriminate(replaced.text, sample.features).is_coe) continue;
    return WordpResult{std::move(replaced.text), keyword, hypernym, replaced.count};
  }
  throw ExhaustedKeywordsError("no keyword substitution turns " + sample_id(sample) + " into Non-CoE");
}

std::string answer_format(std::string_view phrase) {
  std::string p = text::trim(phrase);
  for (const auto& rule : format_rules()) {
    if (std::regex_match(p, rule.pattern)) return rule.name;
  }
  return {};
}

std::string generate_incorrect_answer(Gateway& gw, std::string_view correct_answer) {
  std::string correct = text::trim(correct_answer);
  if (correct.empty()) throw PreconditionError("correct answer must be non-empty");
  const std::string format = answer_format(correct);
  auto acceptable = [&](const std::string& candidate) {
    if (candidate.empty() || text::iequals(candidate, correct)) return false;
    return format.empty() || answer_format(candidate) == format;
  };

  auto req = gw.request(templates::kAnswerGeneration, {{"Correct Answer", correct}});
  std::string out = structured::parse_phrase(gw.complete(req));
  if (acceptable(out)) return out;
  req.suffix =
      "The output must have the same type and format as the input phrase but a different value. "
      "Just output the phrase.";
  out = structured::parse_phrase(gw.complete(req));
  if (acceptable(out)) return out;
  throw FormatMismatchError("generated answer \"" + out + "\" does not match the type/format of \"" +
                            correct + "\"");
}

text::Replacement substitute_answer(std::string_view text_in, std::string_view correct,
                                    std::string_view incorrect) {
  if (correct.empty()) throw PreconditionError("correct answer must be non-empty");
  auto r = text::ireplace_all(text_in, correct, incorrect);
  if (r.count == 0) {
    throw NotFoundError("answer \"" + std::string(correct) + "\" does not occur in the text");
  }
  return r;
}

std::vector<KnowledgeSnippet> generate_misinformation(Gateway& gw, const QASample& sample,
                                                      std::string_view incorrect_answer,
                                                      std::size_t count, std::uint64_t rng_seed) {
  const std::string incorrect = text::trim(incorrect_answer);
  if (incorrect.empty() || text::iequals(incorrect, text::trim(sample.answer))) {
    throw PreconditionError("incorrect answer must be non-empty and differ from the answer");
  }

  // Entity replacement.
  std::vector<std::string> replaced;
  for (const auto& sent : segment_sentences(sample.coe).sentences) {
    if (!text::icontains(sent, sample.answer)) continue;
    std::string t = text::ireplace_all(sent, sample.answer, incorrect).text;
    if (std::find(replaced.begin(), replaced.end(), t) == replaced.end()) replaced.push_back(t);
  }

  // Alternate the two strategies; generated statements fill every other slot
  // and whatever entity replacement cannot.
  std::vector<int> plan;  // 0 = replaced, 1 = generated
  std::size_t used = 0;
  for (std::size_t pos = 0; pos < count; ++pos) {
    if (pos % 2 == 0 && used < replaced.size()) {
      plan.push_back(0);
      ++used;
    } else {
      plan.push_back(1);
    }
  }

  std::vector<std::string> texts;
  std::size_t next_replaced = 0;
  std::size_t variant = 0;
  for (int kind : plan) {
    if (kind == 0) {
      texts.push_back(replaced[next_replaced++]);
      continue;
    }
    ++variant;
    auto req = gw.request(templates::kMisinformationStatement,
                          {{"Question", sample.question},
                           {"Incorrect Answer", incorrect},
                           {"Variant", std::to_string(variant)}});
    std::string statement = text::trim(gw.complete(req));
    if (statement.find(incorrect) == std::string::npos) {
      req.suffix = "The statement must contain \"" + incorrect + "\" exactly as written.";
      statement = text::trim(gw.complete(req));
    }
    if (statement.find(incorrect) == std::string::npos) {
      throw ValidationError("generated misinformation for " + sample_id(sample) +
                                " omits the incorrect answer",
                            {statement});
    }
    texts.push_back(std::move(statement));
  }

  Rng rng(rng_seed);
  rng.shuffle(std::span<std::string>(texts));
  std::vector<KnowledgeSnippet> out;
  const std::string sid = sample_id(sample);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out.emplace_back(sid + "-mis-" + std::to_string(i), std::move(texts[i]), Provenance::misinformation);
  }
  return out;
}

}  // namespace coe
