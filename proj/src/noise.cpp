#include "coe/noise.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>

#include "coe/digest.hpp"
#include "coe/errors.hpp"
#include "coe/parallel.hpp"
#include "coe/random.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

using i128 = __int128;

std::int64_t total_chars(std::span<const KnowledgeSnippet> snippets) {
  std::int64_t n = 0;
  for (const auto& s : snippets) n += static_cast<std::int64_t>(s.char_len());
  return n;
}

// |n / (core + n) - t| compared exactly: returns the numerator of the
// distance over the common denominator (core + n) * t.den.
i128 distance_num(std::int64_t core, std::int64_t n, Ratio t) {
  i128 v = static_cast<i128>(n) * t.den - static_cast<i128>(t.num) * (core + n);
  return v < 0 ? -v : v;
}

// distance(n1) < distance(n2)
bool closer(std::int64_t core, std::int64_t n1, std::int64_t n2, Ratio t) {
  i128 d1 = distance_num(core, n1, t) * (core + n2);
  i128 d2 = distance_num(core, n2, t) * (core + n1);
  return d1 < d2;
}

bool at_or_above(std::int64_t core, std::int64_t n, Ratio t) {
  return static_cast<i128>(n) * t.den >= static_cast<i128>(t.num) * (core + n);
}

bool in_window(std::int64_t n, NoiseWindow w) { return n >= w.lo && n <= w.hi; }

i128 ceil_div(i128 a, i128 b) { return (a + b - 1) / b; }

}  // namespace

std::vector<std::string> irrelevant_queries(const QuestionFeatures& features) {
  if (features.keywords.empty()) throw PreconditionError("irrelevant_queries needs keywords");
  std::vector<std::string> out;
  out.reserve(features.keywords.size());
  for (const auto& k : features.keywords) {
    out.push_back("Please introduce the background of the " + k);
  }
  return out;
}

void to_json(json& j, const SearchResult& r) {
  j = json{{"title", r.title}, {"text", r.text}, {"url", r.url}};
}

void from_json(const json& j, SearchResult& r) {
  r.title = j.value("title", "");
  r.text = j.at("text").get<std::string>();
  r.url = j.value("url", "");
}

FixtureSearchClient::FixtureSearchClient(std::string directory) : directory_(std::move(directory)) {}

std::string FixtureSearchClient::path_for(const std::string& directory, const std::string& query) {
  return (std::filesystem::path(directory) / (sha256_hex(query) + ".json")).string();
}

std::vector<SearchResult> FixtureSearchClient::search(const std::string& query) {
  const std::string path = path_for(directory_, query);
  if (!std::filesystem::exists(path)) return {};
  json doc = json::parse(read_file(path));
  const json& results = doc.is_array() ? doc : doc.at("results");
  return results.get<std::vector<SearchResult>>();
}

void FixtureSearchClient::write(const std::string& directory, const std::string& query,
                                std::span<const SearchResult> results) {
  std::filesystem::create_directories(directory);
  json doc{{"query", query}, {"results", json(std::vector<SearchResult>(results.begin(), results.end()))}};
  write_file_atomic(path_for(directory, query), doc.dump(2) + "\n");
}

std::string normalized_digest(std::string_view text_in) {
  return sha256_hex(text::ascii_lower(text::collapse_whitespace(text_in)));
}

std::vector<KnowledgeSnippet> fetch_noise_pool(std::span<const std::string> queries,
                                               SearchClient& client, std::size_t per_query_limit,
                                               std::string_view exclude_answer, int threads) {
  std::vector<std::vector<SearchResult>> per_query(queries.size());
  parallel::for_each_index(queries.size(), threads, [&](std::size_t i) {
    try {
      per_query[i] = client.search(queries[i]);
    } catch (const std::exception& e) {
      throw SearchError(queries[i], e.what());
    }
  });

  std::vector<KnowledgeSnippet> pool;
  std::set<std::string> seen;
  for (const auto& results : per_query) {
    for (std::size_t r = 0; r < results.size() && r < per_query_limit; ++r) {
      std::string body = text::trim(results[r].text);
      if (body.empty()) continue;
      if (!exclude_answer.empty() && text::icontains(body, exclude_answer)) continue;
      std::string digest = normalized_digest(body);
      if (!seen.insert(digest).second) continue;
      pool.emplace_back("irr-" + digest.substr(0, 12), std::move(body), Provenance::irrelevant);
    }
  }
  return pool;
}

NoiseWindow noise_window(std::int64_t core, Ratio t, Ratio tol, std::int64_t cap) {
  // lo: smallest N with N/(core+N) >= t - tol, i.e. N >= a*core/(1-a).
  NoiseWindow w{0, cap};
  i128 an = static_cast<i128>(t.num) * tol.den - static_cast<i128>(tol.num) * t.den;
  i128 ad = static_cast<i128>(t.den) * tol.den;
  if (an > 0) {
    w.lo = static_cast<std::int64_t>(ceil_div(an * core, ad - an));
  }
  // hi: largest N with N/(core+N) <= t + tol.
  i128 bn = static_cast<i128>(t.num) * tol.den + static_cast<i128>(tol.num) * t.den;
  i128 bd = ad;
  if (bn < bd) {
    i128 hi = (bn * core) / (bd - bn);
    if (hi < cap) w.hi = static_cast<std::int64_t>(hi);
  }
  return w;
}

MixedContext mix_to_ratio(std::span<const KnowledgeSnippet> core,
                          std::span<const KnowledgeSnippet> pool, Ratio target,
                          std::uint64_t rng_seed, Ratio tolerance) {
  if (target.num < 0 || !(target < Ratio{1, 1})) {
    throw PreconditionError("target ratio must lie in [0, 1), got " + format_ratio(target));
  }
  if (core.empty()) throw PreconditionError("mixing needs at least one core snippet");
  for (const auto& s : core) {
    if (is_noise(s.provenance())) throw PreconditionError("core snippet " + s.id() + " is noise");
  }
  for (const auto& s : pool) {
    if (!is_noise(s.provenance())) throw PreconditionError("pool snippet " + s.id() + " is not noise");
  }

  MixedContext out;
  out.target_ratio = target;
  out.tolerance = tolerance;
  out.rng_seed = rng_seed;
  out.snippets.assign(core.begin(), core.end());
  if (target.num == 0) {
    out.achieved_ratio = Ratio{0, 1};
    return out;
  }

  Rng rng(rng_seed);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));

  const std::int64_t core_chars = total_chars(core);
  const std::int64_t pool_chars = total_chars(pool);
  std::int64_t longest = 0;
  for (const auto& s : pool) longest = std::max<std::int64_t>(longest, s.char_len());
  const NoiseWindow window = noise_window(core_chars, target, tolerance, pool_chars);
  if (pool_chars < window.lo) {
    throw InsufficientNoiseError("pool holds " + std::to_string(pool_chars) +
                                 " noise characters; target " + format_ratio(target) + " needs " +
                                 std::to_string(window.lo));
  }

  // Greedy pass.
  std::vector<std::size_t> chosen;
  std::int64_t noise = 0;
  for (std::size_t idx : order) {
    if (at_or_above(core_chars, noise, target)) break;
    const std::int64_t next = noise + static_cast<std::int64_t>(pool[idx].char_len());
    if (at_or_above(core_chars, next, target)) {
      if (closer(core_chars, next, noise, target)) {
        chosen.push_back(idx);
        noise = next;
      }
      break;
    }
    chosen.push_back(idx);
    noise = next;
  }

  if (!in_window(noise, window)) {
    // Exact subset sum over the shuffled pool; first[s] is the shuffled
    // position of the item that first reached sum s.
    const std::int64_t limit = std::min(window.hi, window.lo + longest);
    std::vector<int> first(static_cast<std::size_t>(limit) + 1, -1);
    std::vector<char> reach(static_cast<std::size_t>(limit) + 1, 0);
    reach[0] = 1;
    for (std::size_t p = 0; p < order.size(); ++p) {
      const std::int64_t len = pool[order[p]].char_len();
      for (std::int64_t s = limit; s >= len; --s) {
        if (!reach[s] && reach[s - len]) {
          reach[s] = 1;
          first[s] = static_cast<int>(p);
        }
      }
    }
    std::int64_t best = -1;
    for (std::int64_t s = window.lo; s <= limit; ++s) {
      if (reach[s] && (best < 0 || closer(core_chars, s, best, target))) best = s;
    }
    if (best < 0) {
      throw ToleranceUnreachableError("no subset of the pool lands within " + format_ratio(tolerance) +
                                      " of target " + format_ratio(target));
    }
    chosen.clear();
    for (std::int64_t s = best; s > 0;) {
      const std::size_t p = static_cast<std::size_t>(first[s]);
      chosen.push_back(order[p]);
      s -= pool[order[p]].char_len();
    }
    std::reverse(chosen.begin(), chosen.end());
    noise = best;
  }

  for (std::size_t idx : chosen) {
    const std::size_t pos = static_cast<std::size_t>(rng.below(out.snippets.size() + 1));
    out.snippets.insert(out.snippets.begin() + static_cast<std::ptrdiff_t>(pos), pool[idx]);
  }
  require_unique_ids(out.snippets);
  out.achieved_ratio = Ratio::of(noise, core_chars + noise);
  return out;
}

}  // namespace coe
