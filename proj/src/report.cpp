#include "coe/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "coe/errors.hpp"

namespace coe {
namespace {

using CellKey = std::tuple<std::string, Condition, std::int64_t, std::int64_t>;

CellKey key_of(const std::string& model, Condition c, Ratio r) {
  return {model, c, r.num, r.den};
}

// One observation per unit, in sample-id order of the first repeat.
std::vector<double> observations(const std::vector<const TrialReport*>& reps, MwuUnit unit) {
  std::vector<double> out;
  if (unit == MwuUnit::repeat) {
    for (const auto* r : reps) out.push_back(r->aggregate);
    return out;
  }
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // id -> (true, total)
  for (const auto* r : reps) {
    for (const auto& rec : r->records) {
      auto& t = tally[rec.sample_id];
      t.first += rec.verdict ? 1 : 0;
      t.second += 1;
    }
  }
  for (const auto& [id, t] : tally) {
    const double share = static_cast<double>(t.first) / static_cast<double>(t.second);
    out.push_back(unit == MwuUnit::sample ? (2 * t.first > t.second ? 1.0 : 0.0) : share);
  }
  return out;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string_view to_string(MwuUnit u) {
  switch (u) {
    case MwuUnit::sample: return "sample";
    case MwuUnit::sample_mean: return "sample-mean";
    case MwuUnit::repeat: return "repeat";
  }
  return "sample";
}

MwuUnit mwu_unit_from_string(std::string_view s) {
  if (s == "sample") return MwuUnit::sample;
  if (s == "sample-mean") return MwuUnit::sample_mean;
  if (s == "repeat") return MwuUnit::repeat;
  throw Error("unknown Mann-Whitney unit \"" + std::string(s) + "\"");
}

const ReportCell* ExperimentReport::cell(const std::string& model, Condition c, Ratio r) const {
  for (const auto& x : cells) {
    if (x.model == model && x.condition == c && x.ratio == r) return &x;
  }
  return nullptr;
}

ExperimentReport build_report(std::string experiment, MetricKind metric,
                              std::span<const TrialReport> reports,
                              std::vector<std::string> models, std::vector<Condition> conditions,
                              std::vector<Ratio> ratios, std::span<const SignificancePair> pairs,
                              MwuUnit unit) {
  ExperimentReport out;
  out.experiment = std::move(experiment);
  out.metric = metric;
  out.models = std::move(models);
  out.conditions = std::move(conditions);
  out.ratios = std::move(ratios);
  out.mwu_unit = unit;
  out.method_note = mann_whitney_method_note() + "; unit = " + std::string(to_string(unit));

  std::map<CellKey, std::vector<const TrialReport*>> grouped;
  for (const auto& r : reports) grouped[key_of(r.model, r.condition, r.ratio)].push_back(&r);
  for (auto& [k, reps] : grouped) {
    std::sort(reps.begin(), reps.end(),
              [](const TrialReport* a, const TrialReport* b) { return a->repeat < b->repeat; });
  }

  for (const auto& model : out.models) {
    for (Condition c : out.conditions) {
      for (Ratio ratio : out.ratios) {
        ReportCell cell;
        cell.model = model;
        cell.condition = c;
        cell.ratio = ratio;
        auto it = grouped.find(key_of(model, c, ratio));
        if (it == grouped.end()) {
          out.missing_cells.push_back(model + "/" + std::string(to_string(c)) + "/" + format_ratio(ratio));
          continue;
        }
        double sum = 0.0;
        for (const auto* r : it->second) {
          cell.per_repeat.push_back(r->aggregate);
          sum += r->aggregate;
          for (const auto& rec : r->records) cell.errors += rec.error ? 1 : 0;
        }
        cell.mean = sum / static_cast<double>(cell.per_repeat.size());
        cell.samples = it->second.front()->records.size();
        out.cells.push_back(std::move(cell));
      }
    }
  }

  for (const auto& model : out.models) {
    for (Ratio ratio : out.ratios) {
      for (const auto& pair : pairs) {
        auto a = grouped.find(key_of(model, pair.baseline, ratio));
        auto b = grouped.find(key_of(model, pair.other, ratio));
        if (a == grouped.end() || b == grouped.end()) continue;
        const auto xa = observations(a->second, unit);
        const auto xb = observations(b->second, unit);
        MannWhitneyResult mw = mann_whitney_u(xa, xb);
        out.tests.push_back(SignificanceResult{model, ratio, pair.baseline, pair.other, mw.u, mw.p,
                                               mw.method, mw.note});
        if (mw.p < kSignificanceLevel) {
          for (auto& cell : out.cells) {
            if (cell.model == model && cell.condition == pair.other && cell.ratio == ratio) {
              cell.starred = true;
            }
          }
        }
      }
    }
  }
  return out;
}

std::string render_markdown(const ExperimentReport& r) {
  std::string md = "# " + r.experiment + " (" + std::string(to_string(r.metric)) + ")\n\n";
  md += "| Model | Condition |";
  for (const auto& ratio : r.ratios) md += " " + format_ratio(ratio) + " |";
  md += "\n|---|---|";
  for (std::size_t i = 0; i < r.ratios.size(); ++i) md += "---|";
  md += "\n";
  for (const auto& model : r.models) {
    for (Condition c : r.conditions) {
      md += "| " + model + " | " + std::string(to_string(c)) + " |";
      for (const auto& ratio : r.ratios) {
        const ReportCell* cell = r.cell(model, c, ratio);
        if (!cell) {
          md += " n/a |";
        } else {
          md += " " + fixed3(cell->mean) + (cell->starred ? "*" : "") + " |";
        }
      }
      md += "\n";
    }
  }
  md += "\n`*` p < 0.05 against the baseline condition. " + r.method_note + ".\n";
  if (!r.tests.empty()) {
    md += "\n| Model | Ratio | Baseline | Condition | U | p |\n|---|---|---|---|---|---|\n";
    for (const auto& t : r.tests) {
      char p[32];
      std::snprintf(p, sizeof p, "%.4g", t.p);
      md += "| " + t.model + " | " + format_ratio(t.ratio) + " | " +
            std::string(to_string(t.baseline)) + " | " + std::string(to_string(t.other)) + " | " +
            fixed3(t.u) + " | " + p + (t.note.empty() ? "" : " (" + t.note + ")") + " |\n";
    }
  }
  if (!r.missing_cells.empty()) {
    md += "\nMissing cells:";
    for (const auto& m : r.missing_cells) md += " " + m;
    md += "\n";
  }
  return md;
}

void to_json(json& j, const ReportCell& c) {
  j = json{{"model", c.model},         {"condition", to_string(c.condition)},
           {"ratio", c.ratio},         {"per_repeat", c.per_repeat},
           {"mean", c.mean},           {"samples", c.samples},
           {"errors", c.errors},       {"starred", c.starred}};
}

void from_json(const json& j, ReportCell& c) {
  c.model = j.at("model").get<std::string>();
  c.condition = condition_from_string(j.at("condition").get<std::string>());
  c.ratio = j.at("ratio").get<Ratio>();
  c.per_repeat = j.at("per_repeat").get<std::vector<double>>();
  c.mean = j.at("mean").get<double>();
  c.samples = j.at("samples").get<std::size_t>();
  c.errors = j.at("errors").get<std::size_t>();
  c.starred = j.at("starred").get<bool>();
}

void to_json(json& j, const SignificanceResult& s) {
  j = json{{"model", s.model},   {"ratio", s.ratio},  {"baseline", to_string(s.baseline)},
           {"condition", to_string(s.other)}, {"u", s.u}, {"p", s.p},
           {"method", s.method}, {"note", s.note}};
}

void from_json(const json& j, SignificanceResult& s) {
  s.model = j.at("model").get<std::string>();
  s.ratio = j.at("ratio").get<Ratio>();
  s.baseline = condition_from_string(j.at("baseline").get<std::string>());
  s.other = condition_from_string(j.at("condition").get<std::string>());
  s.u = j.at("u").get<double>();
  s.p = j.at("p").get<double>();
  s.method = j.at("method").get<std::string>();
  s.note = j.value("note", "");
}

void to_json(json& j, const ExperimentReport& r) {
  json conditions = json::array();
  for (Condition c : r.conditions) conditions.push_back(to_string(c));
  j = json{{"experiment", r.experiment},
           {"metric", to_string(r.metric)},
           {"models", r.models},
           {"conditions", conditions},
           {"ratios", r.ratios},
           {"cells", r.cells},
           {"tests", r.tests},
           {"missing_cells", r.missing_cells},
           {"mwu_unit", to_string(r.mwu_unit)},
           {"method_note", r.method_note}};
}

void from_json(const json& j, ExperimentReport& r) {
  r.experiment = j.at("experiment").get<std::string>();
  r.metric = metric_from_string(j.at("metric").get<std::string>());
  r.models = j.at("models").get<std::vector<std::string>>();
  r.conditions.clear();
  for (const auto& c : j.at("conditions")) r.conditions.push_back(condition_from_string(c.get<std::string>()));
  r.ratios = j.at("ratios").get<std::vector<Ratio>>();
  r.cells = j.at("cells").get<std::vector<ReportCell>>();
  r.tests = j.at("tests").get<std::vector<SignificanceResult>>();
  r.missing_cells = j.at("missing_cells").get<std::vector<std::string>>();
  r.mwu_unit = mwu_unit_from_string(j.at("mwu_unit").get<std::string>());
  r.method_note = j.at("method_note").get<std::string>();
}

}  // namespace coe
