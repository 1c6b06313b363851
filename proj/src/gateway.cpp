#include "coe/gateway.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "coe/digest.hpp"
#include "coe/errors.hpp"
#include "coe/model.hpp"

namespace coe {

std::string rendered_prompt(const CompletionRequest& req) {
  std::string out = render_prompt(prompt_template(req.template_name), req.bindings);
  if (!req.suffix.empty()) {
    out += "\n\n";
    out += req.suffix;
  }
  return out;
}

std::string cache_key(const CompletionRequest& req, std::string_view rendered) {
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.6f", req.temperature);
  std::string material;
  material.reserve(rendered.size() + req.model.size() + req.cache_salt.size() + 32);
  material.append(req.model).push_back('\x1f');
  material.append(rendered).push_back('\x1f');
  material.append(temp).push_back('\x1f');
  material.append(req.cache_salt);
  return sha256_hex(material);
}

ResponseCache::ResponseCache(std::string directory) : directory_(std::move(directory)) {
  if (!directory_.empty()) std::filesystem::create_directories(directory_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  if (directory_.empty()) return std::nullopt;
  auto path = std::filesystem::path(directory_) / (key + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  json doc = json::parse(read_file(path.string()));
  std::string response = doc.at("response").get<std::string>();
  std::unique_lock lock(mu_);
  entries_.emplace(key, response);
  return response;
}

void ResponseCache::put(const CacheEntry& entry) {
  std::unique_lock lock(mu_);
  entries_[entry.key] = entry.response;
  if (directory_.empty()) return;
  json doc{{"key", entry.key},
           {"model", entry.model},
           {"template", entry.template_name},
           {"temperature", entry.temperature},
           {"prompt", entry.prompt},
           {"response", entry.response}};
  write_file_atomic((std::filesystem::path(directory_) / (entry.key + ".json")).string(),
                    doc.dump(2));
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::string complete_cached(const CompletionRequest& req, Backend& backend, ResponseCache* cache,
                            const RetryPolicy& policy, CallStats* stats) {
  const std::string prompt = rendered_prompt(req);
  const std::string key = cache_key(req, prompt);
  if (cache) {
    if (auto hit = cache->get(key)) {
      if (stats) ++stats->cache_hits;
      return *hit;
    }
  }

  std::string last_error;
  auto delay = policy.base_delay;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      if (stats) ++stats->backend_calls;
      std::string response = backend.complete(req, prompt);
      if (cache) {
        cache->put(CacheEntry{key, req.model, req.template_name, req.temperature, prompt, response});
      }
      return response;
    } catch (const BackendError& e) {
      if (stats) ++stats->failures;
      last_error = e.what();
    }
    if (attempt < attempts && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier));
    }
  }
  throw BackendExhaustedError(attempts, last_error);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache,
                 std::string model, RetryPolicy policy)
    : backend_(std::move(backend)),
      cache_(std::move(cache)),
      model_(std::move(model)),
      policy_(policy),
      stats_(std::make_shared<CallStats>()) {
  if (!backend_) throw PreconditionError("gateway needs a backend");
}

std::string Gateway::complete(CompletionRequest req) {
  if (req.model.empty()) req.model = model_;
  return complete_cached(req, *backend_, cache_.get(), policy_, stats_.get());
}

CompletionRequest Gateway::request(std::string_view template_name, Bindings bindings) const {
  CompletionRequest req;
  req.template_name = std::string(template_name);
  req.bindings = std::move(bindings);
  req.model = model_;
  return req;
}

Gateway Gateway::with_model(std::string model) const {
  Gateway g(*this);
  g.model_ = std::move(model);
  return g;
}

}  // namespace coe
