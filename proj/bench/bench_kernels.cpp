// Serial references against their OpenMP counterparts. Backends sleep for a
// fixed latency so the judge and answer kernels behave like remote calls.
#include <benchmark/benchmark.h>

#include <chrono>
#include <random>
#include <thread>

#include "coe/coverage.hpp"
#include "coe/discrimination.hpp"
#include "coe/evaluation.hpp"
#include "coe/gateway.hpp"
#include "coe/prompts.hpp"

using namespace coe;

namespace {

std::vector<FeatureJudgment> random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(0.3);
  std::vector<FeatureJudgment> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i].snippet_id = "s" + std::to_string(i);
    m[i].intent_covered = coin(gen);
    for (int j = 0; j < 5; ++j) m[i].keyword_covered.push_back(coin(gen));
    for (int j = 0; j < 3; ++j) m[i].relation_covered.push_back(coin(gen));
  }
  return m;
}

void BM_BruteForceSerial(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_max_coverage_serial(m));
}
BENCHMARK(BM_BruteForceSerial)->Arg(10)->Arg(12);

void BM_BruteForceParallel(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_max_coverage(m, 8));
}
BENCHMARK(BM_BruteForceParallel)->Arg(10)->Arg(12);

// Answers "yes" after a short sleep; the cache is fresh per iteration so every
// request reaches the backend.
class LatencyBackend : public Backend {
 public:
  std::string id() const override { return "latency"; }
  bool deterministic() const override { return true; }
  std::string complete(const CompletionRequest& req, std::string_view) override {
    std::this_thread::sleep_for(std::chrono::microseconds(500));
    if (req.template_name == templates::kQaAnswer) return "x";
    return "yes";
  }
};

const QuestionFeatures kFeatures{"intent", {"a", "b", "c"}, {{{"a", "b"}, "a to b"}, {{"b", "c"}, "b to c"}}};

std::vector<KnowledgeSnippet> snippets(std::size_t n) {
  std::vector<KnowledgeSnippet> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back("s" + std::to_string(i), "a b c " + std::to_string(i), Provenance::web);
  return out;
}

Gateway fresh_gateway() {
  return Gateway(std::make_shared<LatencyBackend>(), std::make_shared<ResponseCache>(), "m",
                 RetryPolicy{1, std::chrono::milliseconds(0), 1.0});
}

void BM_JudgeMatrix(benchmark::State& state) {
  const auto s = snippets(10);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Gateway gw = fresh_gateway();
    if (threads == 1) {
      benchmark::DoNotOptimize(judge_matrix_serial(gw, s, kFeatures));
    } else {
      benchmark::DoNotOptimize(judge_matrix(gw, s, kFeatures, threads));
    }
  }
}
BENCHMARK(BM_JudgeMatrix)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_RunCondition(benchmark::State& state) {
  std::vector<TrialInput> inputs;
  for (int i = 0; i < 16; ++i) inputs.push_back({"s" + std::to_string(i), "q" + std::to_string(i), "ctx", "x", {}});
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Gateway answerer = fresh_gateway();
    Gateway judge = answerer.with_model("judge");
    if (threads == 1) {
      benchmark::DoNotOptimize(
          run_condition_serial(inputs, Condition::coe, Ratio{0, 1}, answerer, judge, 3, MetricKind::acc));
    } else {
      benchmark::DoNotOptimize(
          run_condition(inputs, Condition::coe, Ratio{0, 1}, answerer, judge, 3, MetricKind::acc, threads));
    }
  }
}
BENCHMARK(BM_RunCondition)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
