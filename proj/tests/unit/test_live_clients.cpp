#include <gtest/gtest.h>

#include <thread>

#include "coe/errors.hpp"
#include "coe/live_clients.hpp"
#include "httplib.h"
#include "support.hpp"

namespace coe {
namespace {

// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& prefix) const { return "http://127.0.0.1:" + std::to_string(port_) + prefix; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST(BaseUrlTest, Split) {
  auto a = split_base_url("https://api.openai.com/v1/");
  EXPECT_EQ(a.origin, "https://api.openai.com");
  EXPECT_EQ(a.prefix, "/v1");
  auto b = split_base_url("http://127.0.0.1:8080");
  EXPECT_EQ(b.origin, "http://127.0.0.1:8080");
  EXPECT_EQ(b.prefix, "");
  EXPECT_THROW(split_base_url("localhost:80"), ConfigError);
}

TEST(OpenAi, SendsRenderedPromptAndReadsContent) {
  LocalServer srv;
  std::string seen_body, seen_auth;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    seen_auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices": [{"message": {"content": "Canada"}}]})", "application/json");
  });
  auto backend = std::make_shared<OpenAiBackend>("k-123", srv.url("/v1"));
  Gateway gw = testing::gateway_for(backend, "gpt-test");
  auto req = gw.request(templates::kAnswerGeneration, {{"Correct Answer", "United States"}});
  EXPECT_EQ(gw.complete(req), "Canada");
  EXPECT_EQ(seen_auth, "Bearer k-123");
  auto body = json::parse(seen_body);
  EXPECT_EQ(body["model"], "gpt-test");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][0]["content"], rendered_prompt(req));
  EXPECT_FALSE(backend->deterministic());
}

TEST(OpenAi, RateLimitIsRetriedAndClientErrorsAreNot) {
  LocalServer srv;
  int calls = 0;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    if (calls < 3) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    res.set_content(R"({"choices": [{"message": {"content": "ok"}}]})", "application/json");
  });
  OpenAiBackend backend("k", srv.url("/v1"));
  CompletionRequest req;
  req.template_name = std::string(templates::kAnswerGeneration);
  req.bindings = {{"Correct Answer", "x"}};
  req.model = "m";
  EXPECT_THROW(backend.complete(req, "p"), BackendError);
  EXPECT_EQ(complete_cached(req, backend, nullptr, testing::no_wait(3)), "ok");

  srv.server().Post("/v2/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad", "text/plain");
  });
  OpenAiBackend rejecting("k", srv.url("/v2"));
  try {
    rejecting.complete(req, "p");
    FAIL();
  } catch (const BackendError&) {
    FAIL() << "a 400 must not be retried";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("HTTP 400"), std::string::npos);
  }
}

TEST(Rerank, ScoresFollowReturnedIndices) {
  LocalServer srv;
  srv.server().Post("/r/rerank", [](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    EXPECT_EQ(body["documents"].size(), 3u);
    res.set_content(R"({"results": [{"index": 2, "relevance_score": 0.9}, {"index": 0, "relevance_score": 0.1}]})",
                    "application/json");
  });
  HttpRerankScorer scorer("k", srv.url("/r"), "m");
  std::vector<KnowledgeSnippet> s{{"a", "A", Provenance::web}, {"b", "B", Provenance::web}, {"c", "C", Provenance::web}};
  EXPECT_EQ(scorer.score("q", s), (std::vector<double>{0.1, 0.0, 0.9}));
  EXPECT_EQ(naive_rag_select("q", s, 1, scorer)[0].id(), "c");
}

TEST(Recording, WritesReplayableFixtures) {
  struct Canned : SearchClient {
    std::string id() const override { return "canned"; }
    std::vector<SearchResult> search(const std::string& q) override { return {{"t", "about " + q, "u"}}; }
  };
  testing::TempDir dir;
  RecordingSearchClient rec(std::make_shared<Canned>(), dir.str());
  auto live = rec.search("Please introduce the background of the x");
  FixtureSearchClient replay(dir.str());
  EXPECT_EQ(replay.search("Please introduce the background of the x"), live);
}

}  // namespace
}  // namespace coe
