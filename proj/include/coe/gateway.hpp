#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "coe/prompts.hpp"

namespace coe {

struct CompletionRequest {
  std::string template_name;
  Bindings bindings;
  std::string model;
  double temperature = 0.0;
  std::size_t max_output_chars = 2048;
  // Appended after a blank line; used for reprompts. Part of the prompt.
  std::string suffix;
  // Mixed into the cache key only. Repeats of the answering call set this so
  // that each repeat is a real call.
  std::string cache_salt;
  // Side-channel facts for offline backends (never rendered, never hashed).
  Bindings annotations;
};

// Full prompt text as sent to a provider.
std::string rendered_prompt(const CompletionRequest& req);

std::string cache_key(const CompletionRequest& req, std::string_view rendered);

// Must be callable from several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  // True when identical requests always produce byte-identical text.
  virtual bool deterministic() const = 0;
  // Throws BackendError on failure.
  virtual std::string complete(const CompletionRequest& req, std::string_view rendered) = 0;
};

struct CacheEntry {
  std::string key;
  std::string model;
  std::string template_name;
  double temperature = 0.0;
  std::string prompt;
  std::string response;
};

// Content-addressed response store. In memory, optionally mirrored to a
// directory with one <digest>.json file per entry holding the request and
// the verbatim response. Reads are concurrent; writes are serialized.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::string directory);

  std::optional<std::string> get(const std::string& key);
  void put(const CacheEntry& entry);
  std::size_t size() const;
  const std::string& directory() const { return directory_; }

 private:
  std::string directory_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{200};
  double multiplier = 2.0;
};

struct CallStats {
  std::atomic<std::size_t> backend_calls{0};
  std::atomic<std::size_t> cache_hits{0};
  std::atomic<std::size_t> failures{0};
};

// Cache hit returns the stored text without touching the backend; a miss
// calls the backend with bounded exponential-backoff retries, then stores.
std::string complete_cached(const CompletionRequest& req, Backend& backend, ResponseCache* cache,
                            const RetryPolicy& policy = {}, CallStats* stats = nullptr);

// The single choke point every module talks to: one backend, an optional
// shared cache, a default model id and call counters.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache, std::string model,
          RetryPolicy policy = {});

  // Fills in the default model when req.model is empty.
  std::string complete(CompletionRequest req);

  // Request for a named template with this gateway's model.
  CompletionRequest request(std::string_view template_name, Bindings bindings) const;

  const std::string& model() const { return model_; }
  Backend& backend() { return *backend_; }
  const std::shared_ptr<ResponseCache>& cache() const { return cache_; }
  const CallStats& stats() const { return *stats_; }
  std::size_t backend_calls() const { return stats_->backend_calls.load(); }

  // Same backend and cache under another model id.
  Gateway with_model(std::string model) const;

 private:
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  std::string model_;
  RetryPolicy policy_;
  // Shared so that gateways derived with with_model() count together.
  std::shared_ptr<CallStats> stats_;
};

}  // namespace coe
