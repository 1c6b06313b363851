#include "coe/evaluation.hpp"

#include "coe/discrimination.hpp"
#include "coe/errors.hpp"
#include "coe/parallel.hpp"
#include "coe/text.hpp"

namespace coe {
namespace {

TrialRecord run_one(const TrialInput& in, Gateway& answerer, Gateway& judge, int repeat) {
  TrialRecord rec;
  rec.sample_id = in.sample_id;
  if (in.error) {
    rec.error = *in.error;
    return rec;
  }
  try {
    rec.output = answer_question(answerer, in.question, in.context, repeat, in.sample_id);
    if (text::trim(rec.output).empty()) {
      rec.error = "empty model output";
      return rec;
    }
    rec.verdict = judge_consistency(judge, in.question, in.reference, rec.output);
  } catch (const std::exception& e) {
    rec.verdict = false;
    rec.error = e.what();
  }
  return rec;
}

ConditionRun finish(std::vector<std::vector<TrialRecord>> per_repeat, Condition condition,
                    Ratio ratio, const std::string& model, MetricKind metric) {
  ConditionRun run;
  double sum = 0.0;
  for (std::size_t r = 0; r < per_repeat.size(); ++r) {
    run.repeats.push_back(make_trial_report(condition, model, ratio, static_cast<int>(r), metric,
                                            std::move(per_repeat[r])));
    sum += run.repeats.back().aggregate;
  }
  run.mean = sum / static_cast<double>(run.repeats.size());
  return run;
}

void check_inputs(std::span<const TrialInput> inputs, int repeats) {
  if (inputs.empty()) throw PreconditionError("run_condition needs at least one input");
  if (repeats < 1) throw PreconditionError("repeat count must be at least 1");
}

}  // namespace

std::string answer_question(Gateway& gw, std::string_view question, std::string_view context,
                            int repeat, std::string_view sample_id) {
  auto req = gw.request(templates::kQaAnswer,
                        {{"Context", std::string(context)}, {"Question", std::string(question)}});
  req.cache_salt = "repeat=" + std::to_string(repeat);
  try {
    return text::trim(gw.complete(std::move(req)));
  } catch (const BackendError& e) {
    if (sample_id.empty()) throw;
    throw SampleError(std::string(sample_id), e.what());
  }
}

bool judge_consistency(Gateway& gw, std::string_view question, std::string_view reference,
                       std::string_view output) {
  if (text::trim(question).empty() || text::trim(reference).empty() || text::trim(output).empty()) {
    throw PreconditionError("consistency judgment needs question, reference and output");
  }
  return ask_yes_no(gw, gw.request(templates::kConsistencyJudge,
                                   {{"Question", std::string(question)},
                                    {"Reference Answer", std::string(reference)},
                                    {"Response", std::string(output)}}));
}

ConditionRun run_condition(std::span<const TrialInput> inputs, Condition condition, Ratio ratio,
                           Gateway& answerer, Gateway& judge, int repeats, MetricKind metric,
                           int threads) {
  check_inputs(inputs, repeats);
  std::vector<std::vector<TrialRecord>> per_repeat(static_cast<std::size_t>(repeats),
                                                   std::vector<TrialRecord>(inputs.size()));
  const std::size_t cells = per_repeat.size() * inputs.size();
  parallel::for_each_index(cells, threads, [&](std::size_t c) {
    const std::size_t r = c / inputs.size();
    const std::size_t i = c % inputs.size();
    per_repeat[r][i] = run_one(inputs[i], answerer, judge, static_cast<int>(r));
  });
  return finish(std::move(per_repeat), condition, ratio, answerer.model(), metric);
}

ConditionRun run_condition_serial(std::span<const TrialInput> inputs, Condition condition,
                                  Ratio ratio, Gateway& answerer, Gateway& judge, int repeats,
                                  MetricKind metric) {
  check_inputs(inputs, repeats);
  std::vector<std::vector<TrialRecord>> per_repeat(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    for (const auto& in : inputs) per_repeat[static_cast<std::size_t>(r)].push_back(run_one(in, answerer, judge, r));
  }
  return finish(std::move(per_repeat), condition, ratio, answerer.model(), metric);
}

}  // namespace coe
