#include "coe/live_clients.hpp"

#include <cstdlib>

#include "coe/errors.hpp"
#include "httplib.h"

namespace coe {
namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string require_env(const char* name) {
  std::string v = env_or(name, "");
  if (v.empty()) throw ConfigError(name, "environment variable not set");
  return v;
}

std::unique_ptr<httplib::Client> client_for(const std::string& origin) {
  auto cli = std::make_unique<httplib::Client>(origin);
  cli->set_connection_timeout(10, 0);
  cli->set_read_timeout(120, 0);
  cli->set_follow_location(true);
  return cli;
}

bool retryable(int status) { return status == 429 || status >= 500; }

std::string describe(const httplib::Result& res) {
  if (!res) return "transport error: " + httplib::to_string(res.error());
  return "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300);
}

}  // namespace

BaseUrl split_base_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("base_url", "missing scheme in \"" + url + "\"");
  auto slash = url.find('/', scheme + 3);
  BaseUrl out;
  out.origin = url.substr(0, slash);
  out.prefix = slash == std::string::npos ? "" : url.substr(slash);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

OpenAiBackend::OpenAiBackend(std::string api_key, std::string base_url)
    : api_key_(std::move(api_key)), base_url_(std::move(base_url)) {}

std::shared_ptr<OpenAiBackend> OpenAiBackend::from_env() {
  return std::make_shared<OpenAiBackend>(require_env("OPENAI_API_KEY"),
                                         env_or("OPENAI_BASE_URL", "https://api.openai.com/v1"));
}

std::string OpenAiBackend::complete(const CompletionRequest& req, std::string_view rendered) {
  const BaseUrl base = split_base_url(base_url_);
  auto cli = client_for(base.origin);
  json body{{"model", req.model},
            {"temperature", req.temperature},
            {"messages", json::array({json{{"role", "user"}, {"content", std::string(rendered)}}})}};
  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto res = cli->Post(base.prefix + "/chat/completions", headers, body.dump(), "application/json");
  if (!res || retryable(res->status)) throw BackendError(describe(res));
  if (res->status != 200) throw Error("provider rejected request: " + describe(res));
  json doc = json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
    throw BackendError("unexpected provider payload: " + res->body.substr(0, 300));
  }
  const json& content = doc["choices"][0]["message"]["content"];
  std::string out = content.is_string() ? content.get<std::string>() : std::string();
  if (out.size() > req.max_output_chars) out.resize(req.max_output_chars);
  return out;
}

GoogleSearchClient::GoogleSearchClient(std::string api_key, std::string engine_id)
    : api_key_(std::move(api_key)), engine_id_(std::move(engine_id)) {}

std::shared_ptr<GoogleSearchClient> GoogleSearchClient::from_env() {
  return std::make_shared<GoogleSearchClient>(require_env("GOOGLE_API_KEY"),
                                              require_env("GOOGLE_CSE_ID"));
}

std::vector<SearchResult> GoogleSearchClient::search(const std::string& query) {
  auto cli = client_for("https://www.googleapis.com");
  httplib::Params params{{"key", api_key_}, {"cx", engine_id_}, {"q", query}, {"num", "10"}};
  auto res = cli->Get("/customsearch/v1", params, httplib::Headers{});
  if (!res || res->status != 200) throw Error(describe(res));
  json doc = json::parse(res->body);
  std::vector<SearchResult> out;
  if (!doc.contains("items")) return out;
  for (const auto& item : doc["items"]) {
    out.push_back(SearchResult{item.value("title", ""), item.value("snippet", ""), item.value("link", "")});
  }
  return out;
}

RecordingSearchClient::RecordingSearchClient(std::shared_ptr<SearchClient> inner, std::string directory)
    : inner_(std::move(inner)), directory_(std::move(directory)) {}

std::vector<SearchResult> RecordingSearchClient::search(const std::string& query) {
  auto results = inner_->search(query);
  FixtureSearchClient::write(directory_, query, results);
  return results;
}

HttpRerankScorer::HttpRerankScorer(std::string api_key, std::string base_url, std::string model)
    : api_key_(std::move(api_key)), base_url_(std::move(base_url)), model_(std::move(model)) {}

std::shared_ptr<HttpRerankScorer> HttpRerankScorer::from_env() {
  return std::make_shared<HttpRerankScorer>(require_env("RERANK_API_KEY"),
                                            env_or("RERANK_BASE_URL", "https://api.cohere.com/v1"),
                                            env_or("RERANK_MODEL", "rerank-english-v3.0"));
}

std::vector<double> HttpRerankScorer::score(std::string_view question,
                                            std::span<const KnowledgeSnippet> snippets) {
  std::vector<double> scores(snippets.size(), 0.0);
  if (snippets.empty()) return scores;
  json docs = json::array();
  for (const auto& s : snippets) docs.push_back(s.text());
  json body{{"model", model_}, {"query", std::string(question)}, {"documents", docs}};
  const BaseUrl base = split_base_url(base_url_);
  auto cli = client_for(base.origin);
  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto res = cli->Post(base.prefix + "/rerank", headers, body.dump(), "application/json");
  if (!res || res->status != 200) throw Error("rerank failed: " + describe(res));
  json doc = json::parse(res->body);
  for (const auto& r : doc.at("results")) {
    auto idx = r.at("index").get<std::size_t>();
    if (idx < scores.size()) scores[idx] = r.at("relevance_score").get<double>();
  }
  return scores;
}

}  // namespace coe
