#include <gtest/gtest.h>

#include "coe/errors.hpp"
#include "coe/report.hpp"

namespace coe {
namespace {

TrialReport report(Condition c, Ratio ratio, int repeat, std::vector<bool> verdicts, std::string model = "m") {
  std::vector<TrialRecord> recs;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    recs.push_back(TrialRecord{"s" + std::to_string(i), verdicts[i] ? "yes" : "no", verdicts[i], std::nullopt});
  }
  return make_trial_report(c, std::move(model), ratio, repeat, MetricKind::acc, std::move(recs));
}

TEST(Report, SingleCell) {
  std::vector<TrialReport> reps{report(Condition::coe, {0, 1}, 0, {true, false}),
                                report(Condition::coe, {0, 1}, 1, {true, true})};
  auto r = build_report("e", MetricKind::acc, reps, {"m"}, {Condition::coe}, {{0, 1}}, {});
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0].per_repeat, (std::vector<double>{0.5, 1.0}));
  EXPECT_DOUBLE_EQ(r.cells[0].mean, 0.75);
  EXPECT_EQ(r.cells[0].samples, 2u);
  EXPECT_TRUE(r.missing_cells.empty());
  auto md = render_markdown(r);
  EXPECT_NE(md.find("| m | CoE | 0.750 |"), std::string::npos);
}

TEST(Report, SignificantDropIsStarred) {
  std::vector<TrialReport> reps;
  for (int k = 0; k < 3; ++k) {
    reps.push_back(report(Condition::coe, {0, 1}, k, std::vector<bool>(20, true)));
    reps.push_back(report(Condition::senp, {0, 1}, k, std::vector<bool>(20, false)));
    std::vector<bool> mostly(20, true);
    mostly[0] = false;
    reps.push_back(report(Condition::wordp, {0, 1}, k, mostly));
  }
  std::vector<SignificancePair> pairs{{Condition::coe, Condition::senp}, {Condition::coe, Condition::wordp}};
  auto r = build_report("e", MetricKind::acc, reps, {"m"}, {Condition::coe, Condition::senp, Condition::wordp},
                        {{0, 1}}, pairs);
  ASSERT_EQ(r.tests.size(), 2u);
  EXPECT_LT(r.tests[0].p, 0.05);
  EXPECT_GT(r.tests[1].p, 0.05);
  EXPECT_FALSE(r.cell("m", Condition::coe, {0, 1})->starred);
  EXPECT_TRUE(r.cell("m", Condition::senp, {0, 1})->starred);
  EXPECT_FALSE(r.cell("m", Condition::wordp, {0, 1})->starred);
  EXPECT_NE(render_markdown(r).find("| m | SenP | 0.000* |"), std::string::npos);
}

TEST(Report, UnitsChangeTheObservations) {
  std::vector<TrialReport> reps;
  for (int k = 0; k < 3; ++k) {
    reps.push_back(report(Condition::coe, {0, 1}, k, {true, true, true, k != 0}));
    reps.push_back(report(Condition::senp, {0, 1}, k, {false, false, k == 0, false}));
  }
  std::vector<SignificancePair> pairs{{Condition::coe, Condition::senp}};
  std::vector<Condition> conds{Condition::coe, Condition::senp};
  auto by_sample = build_report("e", MetricKind::acc, reps, {"m"}, conds, {{0, 1}}, pairs, MwuUnit::sample);
  auto by_repeat = build_report("e", MetricKind::acc, reps, {"m"}, conds, {{0, 1}}, pairs, MwuUnit::repeat);
  // Majority per sample: [1,1,1,1] vs [0,0,0,0].
  EXPECT_DOUBLE_EQ(by_sample.tests[0].u, 16.0);
  EXPECT_NEAR(by_sample.tests[0].p, 2.0 / 70.0, 1e-12);
  // Per-repeat aggregates: three values each side, all CoE above all SenP.
  EXPECT_DOUBLE_EQ(by_repeat.tests[0].u, 9.0);
  EXPECT_EQ(mwu_unit_from_string(to_string(MwuUnit::sample_mean)), MwuUnit::sample_mean);
  EXPECT_THROW(mwu_unit_from_string("x"), Error);
}

TEST(Report, EveryExpectedCellIsAccountedFor) {
  std::vector<TrialReport> reps{report(Condition::coe, {0, 1}, 0, {true}, "a"),
                                report(Condition::senp, {1, 4}, 0, {false}, "b")};
  auto r = build_report("e", MetricKind::fr, reps, {"a", "b"}, {Condition::coe, Condition::senp}, {{0, 1}, {1, 4}}, {});
  EXPECT_EQ(r.cells.size() + r.missing_cells.size(), 2u * 2u * 2u);
  EXPECT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.missing_cells.front(), "a/CoE/0.25");
  auto md = render_markdown(r);
  EXPECT_NE(md.find("n/a"), std::string::npos);
  EXPECT_NE(md.find("Missing cells: a/CoE/0.25"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  std::vector<TrialReport> reps;
  for (int k = 0; k < 2; ++k) {
    reps.push_back(report(Condition::coe, {1, 2}, k, {true, true, true, true, true}));
    reps.push_back(report(Condition::wordp, {1, 2}, k, {false, false, false, false, true}));
  }
  std::vector<SignificancePair> pairs{{Condition::coe, Condition::wordp}};
  auto r = build_report("robustness", MetricKind::acc, reps, {"m"}, {Condition::coe, Condition::wordp}, {{1, 2}, {3, 4}},
                        pairs, MwuUnit::sample_mean);
  json j = r;
  EXPECT_EQ(j.get<ExperimentReport>(), r);
  EXPECT_EQ(json::parse(j.dump()).get<ExperimentReport>(), r);
}

}  // namespace
}  // namespace coe
