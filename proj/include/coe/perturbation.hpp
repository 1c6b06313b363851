#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coe/discrimination.hpp"
#include "coe/gateway.hpp"
#include "coe/model.hpp"
#include "coe/text.hpp"

namespace coe {

struct SegmentOptions {
  // Treat "A." (one capital letter) as an initial rather than a sentence end.
  bool guard_single_letter = true;
  // Tokens that end in a period without ending the sentence, given without
  // the final period ("Mr", "U.S", "Sept").
  std::vector<std::string> abbreviations = default_abbreviations();

  static std::vector<std::string> default_abbreviations();
};

// leading + s[0] + sep[0] + s[1] + sep[1] + ... reproduces the input exactly.
struct SentenceSplit {
  std::string leading;
  std::vector<std::string> sentences;
  std::vector<std::string> separators;

  std::string join() const;
};

// Splits after runs of . ! ? (plus closing quotes or brackets) that are
// followed by whitespace or the end of the text, unless the period closes an
// abbreviation or an initial.
SentenceSplit segment_sentences(std::string_view text, const SegmentOptions& options = {});

struct SenpResult {
  std::string text;
  std::vector<std::size_t> removed;  // sentence indices, ascending
  std::vector<std::string> sentences;
};

// Sentence-level perturbation. Candidates are sentences that mention a
// question keyword and not the answer. Each candidate is removed on its own
// first, in document order; if none of those remainders is Non-CoE, growing
// prefixes of the candidate list are removed cumulatively. The first Non-CoE
// remainder is returned, kept sentences joined with single spaces.
// Throws PreconditionError when sample.coe is not a CoE, NoCandidatesError,
// or NeverBreaksError.
SenpResult senp(const QASample& sample, const CoeDiscriminator& discriminate,
                const SegmentOptions& options = {});

struct WordpResult {
  std::string text;
  std::string keyword;
  std::string hypernym;
  std::size_t replacements = 0;
};

// Word-level perturbation. Keywords are tried in a seeded random order; each
// gets a more general phrase from the generalization prompt, every
// case-insensitive mention is replaced, and the first result judged Non-CoE
// is returned. Throws ExhaustedKeywordsError.
WordpResult wordp(Gateway& gw, const QASample& sample, std::uint64_t rng_seed,
                  const CoeDiscriminator& discriminate);

// Incorrect answer of the same type and format, via the answer-generation
// prompt. Dates must stay dates of the same layout and separated numbers
// stay separated numbers; one retry, then FormatMismatchError.
std::string generate_incorrect_answer(Gateway& gw, std::string_view correct_answer);

// Name of the date/number layout the phrase matches, or empty.
std::string answer_format(std::string_view phrase);

// Throws NotFoundError when `correct` does not occur (case-insensitive).
text::Replacement substitute_answer(std::string_view text, std::string_view correct,
                                    std::string_view incorrect);

// Misinformation snippets: answer-bearing CoE sentences with the answer
// swapped (entity replacement) alternating with generated statements that
// contain the incorrect answer verbatim, `count` in total, then shuffled
// with the seed.
std::vector<KnowledgeSnippet> generate_misinformation(Gateway& gw, const QASample& sample,
                                                      std::string_view incorrect_answer,
                                                      std::size_t count, std::uint64_t rng_seed);

}  // namespace coe
