#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coe/mann_whitney.hpp"
#include "coe/model.hpp"

namespace coe {

// What one observation fed to the significance test is.
enum class MwuUnit {
  sample,       // per-sample majority verdict across repeats (0/1)
  sample_mean,  // per-sample share of true verdicts across repeats
  repeat,       // per-repeat aggregate
};
std::string_view to_string(MwuUnit u);
MwuUnit mwu_unit_from_string(std::string_view s);

struct SignificancePair {
  Condition baseline;
  Condition other;
};

struct ReportCell {
  std::string model;
  Condition condition = Condition::coe;
  Ratio ratio;
  std::vector<double> per_repeat;
  double mean = 0.0;
  std::size_t samples = 0;
  std::size_t errors = 0;
  bool starred = false;  // some test against a baseline gave p < kSignificanceLevel
  bool operator==(const ReportCell&) const = default;
};

struct SignificanceResult {
  std::string model;
  Ratio ratio;
  Condition baseline = Condition::coe;
  Condition other = Condition::coe;
  double u = 0.0;
  double p = 1.0;
  std::string method;
  std::string note;
  bool operator==(const SignificanceResult&) const = default;
};

inline constexpr double kSignificanceLevel = 0.05;

struct ExperimentReport {
  std::string experiment;
  MetricKind metric = MetricKind::acc;
  std::vector<std::string> models;
  std::vector<Condition> conditions;
  std::vector<Ratio> ratios;
  std::vector<ReportCell> cells;
  std::vector<SignificanceResult> tests;
  std::vector<std::string> missing_cells;  // "model/condition/ratio"
  MwuUnit mwu_unit = MwuUnit::sample;
  std::string method_note;
  bool operator==(const ExperimentReport&) const = default;

  const ReportCell* cell(const std::string& model, Condition c, Ratio r) const;
};

// Groups the per-repeat reports into model x condition x ratio cells. Every
// expected cell is present; ones without reports are listed in missing_cells.
// Each pair is tested per model and ratio when both cells exist.
ExperimentReport build_report(std::string experiment, MetricKind metric,
                              std::span<const TrialReport> reports,
                              std::vector<std::string> models, std::vector<Condition> conditions,
                              std::vector<Ratio> ratios, std::span<const SignificancePair> pairs,
                              MwuUnit unit = MwuUnit::sample);

// Rows are model x condition, columns are ratios; "n/a" for missing cells and
// a trailing "*" on starred ones.
std::string render_markdown(const ExperimentReport& r);

void to_json(json& j, const ReportCell& c);
void from_json(const json& j, ReportCell& c);
void to_json(json& j, const SignificanceResult& s);
void from_json(const json& j, SignificanceResult& s);
void to_json(json& j, const ExperimentReport& r);
void from_json(const json& j, ExperimentReport& r);

}  // namespace coe
