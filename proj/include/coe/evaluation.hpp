#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coe/gateway.hpp"
#include "coe/model.hpp"

namespace coe {

// One completion of the QA wrapper. The repeat index goes into the cache
// salt only, so every repeat is a real call while the prompt stays fixed.
// Backend failures are rethrown as SampleError when sample_id is given.
std::string answer_question(Gateway& gw, std::string_view question, std::string_view context,
                            int repeat = 0, std::string_view sample_id = {});

// Whether `output` gives the same answer as `reference`, per the consistency
// judge. Throws PreconditionError on an empty argument.
bool judge_consistency(Gateway& gw, std::string_view question, std::string_view reference,
                       std::string_view output);

// One sample of one condition with its context already assembled.
struct TrialInput {
  std::string sample_id;
  std::string question;
  std::string context;
  // True answer for ACC, the substituted incorrect answer for FR.
  std::string reference;
  // Set when the context could not be built; the trial is recorded as a
  // failure without calling any model.
  std::optional<std::string> error;
};

struct ConditionRun {
  std::vector<TrialReport> repeats;
  double mean = 0.0;  // mean of the per-repeat aggregates
};

// `repeats` full passes over the inputs. Within a pass samples run on up to
// `threads` workers; records are kept in input order. A sample whose answer
// or judgment fails is recorded as judge=false with the error message.
ConditionRun run_condition(std::span<const TrialInput> inputs, Condition condition, Ratio ratio,
                           Gateway& answerer, Gateway& judge, int repeats, MetricKind metric,
                           int threads);

// Reference implementation without OpenMP.
ConditionRun run_condition_serial(std::span<const TrialInput> inputs, Condition condition,
                                  Ratio ratio, Gateway& answerer, Gateway& judge, int repeats,
                                  MetricKind metric);

}  // namespace coe
