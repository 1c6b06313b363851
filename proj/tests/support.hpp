#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "coe/dataset.hpp"
#include "coe/errors.hpp"
#include "coe/gateway.hpp"
#include "coe/mock_backend.hpp"
#include "coe/model.hpp"

namespace coe::testing {

inline std::string source_path(const std::string& rel) { return std::string(COE_SOURCE_DIR) + "/" + rel; }

// Answers through a function of the request; counts calls.
class FnBackend : public Backend {
 public:
  using Fn = std::function<std::string(const CompletionRequest&, std::string_view)>;
  explicit FnBackend(Fn fn, bool deterministic = true) : fn_(std::move(fn)), deterministic_(deterministic) {}
  std::string id() const override { return "fn"; }
  bool deterministic() const override { return deterministic_; }
  std::string complete(const CompletionRequest& req, std::string_view rendered) override {
    ++calls;
    return fn_(req, rendered);
  }
  std::atomic<int> calls{0};

 private:
  Fn fn_;
  bool deterministic_;
};

// Replies with queued texts in order; an empty queue is a backend failure.
class SequenceBackend : public Backend {
 public:
  explicit SequenceBackend(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}
  std::string id() const override { return "sequence"; }
  bool deterministic() const override { return false; }
  std::string complete(const CompletionRequest& req, std::string_view rendered) override {
    std::lock_guard lock(mu_);
    prompts.emplace_back(rendered);
    templates.push_back(req.template_name);
    if (replies_.empty()) throw BackendError("script exhausted");
    std::string r = std::move(replies_.front());
    replies_.pop_front();
    return r;
  }
  std::vector<std::string> prompts;
  std::vector<std::string> templates;

 private:
  std::mutex mu_;
  std::deque<std::string> replies_;
};

inline RetryPolicy no_wait(int attempts = 3) { return RetryPolicy{attempts, std::chrono::milliseconds(0), 2.0}; }

inline Gateway gateway_for(std::shared_ptr<Backend> b, std::string model = "test-model") {
  return Gateway(std::move(b), std::make_shared<ResponseCache>(), std::move(model), no_wait());
}

inline std::vector<QASample> synthetic_samples() {
  return load_samples(source_path("data/synthetic/samples.jsonl"));
}

inline MockRules synthetic_rules() {
  MockRules r = MockRules::from_json(json::parse(read_file(source_path("data/synthetic/mock_rules.json"))));
  auto samples = synthetic_samples();
  r.add_samples(samples);
  return r;
}

inline Gateway mock_gateway(MockRules rules, std::string model = "mock-judge") {
  return gateway_for(std::make_shared<MockBackend>(std::move(rules)), std::move(model));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("coe-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const { return rel.empty() ? path_.string() : (path_ / rel).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace coe::testing
