#pragma once

#include <memory>
#include <string>

#include "coe/gateway.hpp"
#include "coe/noise.hpp"
#include "coe/rag.hpp"

namespace coe {

// Splits "https://host:port/prefix" into the scheme-host-port part and the
// path prefix (without trailing slash).
struct BaseUrl {
  std::string origin;
  std::string prefix;
};
BaseUrl split_base_url(const std::string& url);

// Chat-completions provider. Credentials from OPENAI_API_KEY; endpoint from
// OPENAI_BASE_URL (default https://api.openai.com/v1). The rendered prompt is
// sent as one user message. Transport errors, 429 and 5xx raise BackendError
// so the gateway retries them.
class OpenAiBackend : public Backend {
 public:
  OpenAiBackend(std::string api_key, std::string base_url);
  static std::shared_ptr<OpenAiBackend> from_env();

  std::string id() const override { return "openai:" + base_url_; }
  bool deterministic() const override { return false; }
  std::string complete(const CompletionRequest& req, std::string_view rendered) override;

 private:
  std::string api_key_;
  std::string base_url_;
};

// Google Programmable Search JSON API. Credentials from GOOGLE_API_KEY and
// GOOGLE_CSE_ID. Returns at most 10 results per query.
class GoogleSearchClient : public SearchClient {
 public:
  GoogleSearchClient(std::string api_key, std::string engine_id);
  static std::shared_ptr<GoogleSearchClient> from_env();

  std::string id() const override { return "google-cse"; }
  std::vector<SearchResult> search(const std::string& query) override;

 private:
  std::string api_key_;
  std::string engine_id_;
};

// Search client that records every live response as a fixture file, so a
// live run can be replayed offline.
class RecordingSearchClient : public SearchClient {
 public:
  RecordingSearchClient(std::shared_ptr<SearchClient> inner, std::string directory);
  std::string id() const override { return inner_->id(); }
  std::vector<SearchResult> search(const std::string& query) override;

 private:
  std::shared_ptr<SearchClient> inner_;
  std::string directory_;
};

// Rerank endpoint taking {model, query, documents} and returning
// {results: [{index, relevance_score}]}. Credentials from RERANK_API_KEY;
// endpoint from RERANK_BASE_URL; model from RERANK_MODEL.
class HttpRerankScorer : public RelevanceScorer {
 public:
  HttpRerankScorer(std::string api_key, std::string base_url, std::string model);
  static std::shared_ptr<HttpRerankScorer> from_env();

  std::string id() const override { return "rerank:" + model_; }
  std::vector<double> score(std::string_view question,
                            std::span<const KnowledgeSnippet> snippets) override;

 private:
  std::string api_key_;
  std::string base_url_;
  std::string model_;
};

}  // namespace coe
