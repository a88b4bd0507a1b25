#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "sspm/experiment.hpp"

using namespace sspm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.workload.kind = WorkloadKind::ZipfSuffixDelete;
  cfg.workload.beta = 1.0;
  cfg.workload.universe = 4000;
  cfg.workload.insertions = 20000;
  cfg.workload.deletions = 10000;
  cfg.workload.seed = 5;
  cfg.epsilon = 0.01;
  cfg.alpha = 2.0;
  cfg.k_top = 50;
  cfg.seed = 5;
  return cfg;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_csv(os, r.rows);
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

} // namespace

TEST(Experiment, EmptyRosterGivesNoRows) {
  const auto r = run_experiment(small_config());
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(csv_of(r), std::string(kCsvHeader) + "\r\n");
}

TEST(Experiment, InvalidConfigRejected) {
  auto cfg = small_config();
  cfg.epsilon = 1.0;
  EXPECT_THROW(run_experiment(cfg), ConfigInvalid);
  cfg = small_config();
  cfg.alpha = 0.9;
  EXPECT_THROW(run_experiment(cfg), ConfigInvalid);
  cfg = small_config();
  cfg.sketches = {{SketchKind::ISS, 0}};
  EXPECT_THROW(run_experiment(cfg), ConfigInvalid);
  cfg = small_config();
  cfg.sketches = {{SketchKind::ISS, 2}};
  EXPECT_THROW(run_experiment(cfg), BudgetTooSmall);
  EXPECT_THROW(parse_sketch_kind("bloom"), ConfigInvalid);
  EXPECT_EQ(parse_sketch_kind("countsketch"), SketchKind::CountSketch);
}

TEST(Experiment, IntegratedSweepPassesEpsilonBound) {
  auto cfg = small_config();
  const std::size_t budgets[] = {2048, 4096, 8192, 16384};
  const SketchKind kinds[] = {SketchKind::ISS};
  cfg.sketches = sweep(kinds, budgets);
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.eps_bound_pass) << row.budget_fields;
    EXPECT_TRUE(row.guaranteed);
    EXPECT_FALSE(row.violates());
  }
  EXPECT_FALSE(r.bound_violation());
}

TEST(Experiment, FieldAccountingPerSketch) {
  auto cfg = small_config();
  const std::size_t budgets[] = {1000};
  const SketchKind kinds[] = {SketchKind::SS,         SketchKind::USS,      SketchKind::DSS,
                              SketchKind::UDSS,       SketchKind::ISS,      SketchKind::LegacySSPM,
                              SketchKind::CountMin,   SketchKind::CountSketch};
  cfg.sketches = sweep(kinds, budgets);
  const auto r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 8u);
  for (const auto& row : r.rows) EXPECT_LE(row.budget_fields, 1000u) << to_string(row.sketch);
  EXPECT_EQ(r.rows[0].entries, 500u);   // SS: 2 fields per entry
  EXPECT_EQ(r.rows[2].entries, 500u);   // DSS: 2 fields per entry across both sides
  EXPECT_EQ(r.rows[2].budget_fields, 1000u);
  EXPECT_EQ(r.rows[4].entries, 333u);   // ISS: 3 fields per entry
  EXPECT_EQ(r.rows[4].budget_fields, 999u);
  EXPECT_EQ(r.rows[6].budget_fields, 999u);  // ceil(ln 4000) = 9 rows of 111
}

TEST(Experiment, DoubleBudgetSplitFollowsAlpha) {
  EXPECT_EQ(detail::split_double_budget(600, 2.0), (DoubleSizing{400, 200}));
  EXPECT_EQ(detail::split_double_budget(10, 1.0), (DoubleSizing{9, 1}));
  EXPECT_THROW(detail::split_double_budget(1, 2.0), BudgetTooSmall);
}

TEST(Experiment, CsvIsByteIdenticalAcrossRuns) {
  auto cfg = small_config();
  const std::size_t budgets[] = {512, 2048};
  const SketchKind kinds[] = {SketchKind::ISS, SketchKind::UDSS, SketchKind::USS, SketchKind::CountSketch};
  cfg.sketches = sweep(kinds, budgets);
  const auto first = csv_of(run_experiment(cfg));
  const auto second = csv_of(run_experiment(cfg));
  EXPECT_EQ(first, second);
}

TEST(Experiment, CsvSchema) {
  auto cfg = small_config();
  const std::size_t budgets[] = {4096};
  const SketchKind kinds[] = {SketchKind::DSS, SketchKind::CountMin};
  cfg.sketches = sweep(kinds, budgets);
  const auto text = csv_of(run_experiment(cfg));
  std::istringstream in(text);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, std::string(kCsvHeader) + "\r");
  const auto f1 = split(row1.substr(0, row1.size() - 1), ',');
  const auto f2 = split(row2.substr(0, row2.size() - 1), ',');
  ASSERT_EQ(f1.size(), 14u);
  ASSERT_EQ(f2.size(), 14u);
  EXPECT_EQ(f1[0], "DSS");
  EXPECT_EQ(f1[1], "bounded-deletion");
  EXPECT_EQ(f1[12], "true");  // 2048 entries cover k = 1 at eps = 0.01
  EXPECT_EQ(f2[0], "CountMin");
  EXPECT_EQ(f2[1], "turnstile");
  EXPECT_EQ(f2[12], "NA");
  EXPECT_EQ(f2[13], "0");
}

TEST(Experiment, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Experiment, TopKIsNotApplicableWithFewItems) {
  auto cfg = small_config();
  cfg.workload.universe = 20;
  cfg.k_top = 100;
  cfg.sketches = {{SketchKind::ISS, 300}};
  const auto r = run_experiment(cfg);
  EXPECT_FALSE(r.rows[0].f1_topk.has_value());
  EXPECT_NE(csv_of(r).find(",NA,"), std::string::npos);
}

TEST(Experiment, FileWorkloadMatchesInMemory) {
  auto cfg = small_config();
  cfg.sketches = {{SketchKind::ISS, 900}, {SketchKind::CountSketch, 900}};
  const auto w = generate(cfg.workload);
  const std::string path = ::testing::TempDir() + "sspm_stream.txt";
  {
    std::ofstream out(path);
    write_stream(out, w.ops, w.manifest);
  }
  auto file_cfg = cfg;
  file_cfg.workload_file = path;
  const auto from_file = run_experiment(file_cfg);
  const auto in_memory = run_experiment(cfg, w.ops);
  ASSERT_EQ(from_file.rows.size(), 2u);
  EXPECT_EQ(to_csv(from_file.rows[0]), to_csv(in_memory.rows[0]));
  EXPECT_EQ(from_file.stats.f1, w.stats.f1);
}

TEST(Experiment, BoundReportCsvRow) {
  BoundReport r;
  r.kind = BoundKind::Merge;
  r.bound_value = 12.5;
  r.max_observed_error = 3;
  EXPECT_EQ(to_csv(r), "merge,12.5,3,0,true");
}

TEST(Errata, MTwoLegacyFailsIntegratedPasses) {
  const auto r = demo_errata(2);
  EXPECT_FALSE(r.legacy_vs_f1.passed);
  EXPECT_FALSE(r.legacy_vs_f1.violating_items.empty());
  EXPECT_FALSE(r.legacy_vs_inserts.passed);
  EXPECT_TRUE(r.iss_matched.passed);
  EXPECT_TRUE(r.iss_matched.violating_items.empty());
  EXPECT_TRUE(r.iss_same_entries.passed);
  EXPECT_EQ(r.iss_capacity, 4u);  // ceil(26 * 2 / 15)
}

TEST(Errata, OutputIsStable) {
  EXPECT_EQ(format_errata(demo_errata(3)), format_errata(demo_errata(3)));
  EXPECT_THROW(demo_errata(1), ConfigInvalid);
}
