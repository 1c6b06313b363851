#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coe/model.hpp"

namespace coe {

// "Please introduce the background of the <keyword>", one per keyword, in
// keyword order. Throws PreconditionError when there are no keywords.
std::vector<std::string> irrelevant_queries(const QuestionFeatures& features);

struct SearchResult {
  std::string title;
  std::string text;
  std::string url;
  bool operator==(const SearchResult&) const = default;
};

void to_json(json& j, const SearchResult& r);
void from_json(const json& j, SearchResult& r);

// Query string in, ranked results out. Implementations must tolerate
// concurrent calls.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual std::string id() const = 0;
  virtual std::vector<SearchResult> search(const std::string& query) = 0;
};

// Replays canned responses: <dir>/<sha256(query)>.json holding
// {"query": ..., "results": [{title, text, url}, ...]}. A query without a
// file has no results.
class FixtureSearchClient : public SearchClient {
 public:
  explicit FixtureSearchClient(std::string directory);
  std::string id() const override { return "fixture:" + directory_; }
  std::vector<SearchResult> search(const std::string& query) override;

  static std::string path_for(const std::string& directory, const std::string& query);
  static void write(const std::string& directory, const std::string& query,
                    std::span<const SearchResult> results);

 private:
  std::string directory_;
};

// Digest of the whitespace-collapsed, lowercased text.
std::string normalized_digest(std::string_view text);

// Irrelevant-provenance snippets from the first `per_query_limit` results of
// each query, in query order. Duplicates (by normalized_digest) and results
// mentioning `exclude_answer` are dropped. Client failures are rethrown as
// SearchError naming the query.
std::vector<KnowledgeSnippet> fetch_noise_pool(std::span<const std::string> queries,
                                               SearchClient& client, std::size_t per_query_limit,
                                               std::string_view exclude_answer, int threads = 1);

// Inclusive range of noise character counts N with
// |N / (core + N) - target| <= tol. hi is clamped to `cap`.
struct NoiseWindow {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
NoiseWindow noise_window(std::int64_t core_chars, Ratio target, Ratio tol, std::int64_t cap);

// Core snippets with noise interleaved so that the noise share of characters
// lands within `tolerance` of `target`. The pool is shuffled with the seed and
// consumed greedily while the ratio is below target; the snippet that crosses
// the target is kept only if it brings the ratio closer. When the greedy pick
// misses the window, an exact subset-sum over the shuffled pool picks the
// reachable noise mass closest to the target. Each chosen snippet is inserted
// at a seeded uniform position; core order is preserved.
// Throws PreconditionError, InsufficientNoiseError, ToleranceUnreachableError.
MixedContext mix_to_ratio(std::span<const KnowledgeSnippet> core,
                          std::span<const KnowledgeSnippet> pool, Ratio target,
                          std::uint64_t rng_seed, Ratio tolerance = kMixTolerance);

}  // namespace coe
