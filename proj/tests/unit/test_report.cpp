#include <gtest/gtest.h>

#include <filesystem>

#include "hatmatch/csv.hpp"
#include "hatmatch/pipeline.hpp"
#include "hatmatch/report.hpp"
#include "hatmatch/synthgen.hpp"
#include "synth_run.hpp"

using namespace hatmatch;
namespace fs = std::filesystem;

TEST(Report, FullRunCopiesTableCellsVerbatim) {
  const auto synth = read_synth_config(std::string(HATMATCH_DATA_DIR) + "/demo/synth.json");
  const auto run = fixture::make_synth_run("report_full", synth);
  ASSERT_EQ(run_pipeline(load_pipeline_config(run.config.string())).exit_code, 0);
  const auto report = build_report(run.out.string());
  EXPECT_TRUE(report.missing.empty());
  const auto& text = report.text;
  EXPECT_NE(text.find("Talent hat×Movement"), std::string::npos);
  EXPECT_NE(text.find("#Pairs"), std::string::npos);
  EXPECT_NE(text.find("R² (overall)"), std::string::npos);
  EXPECT_NE(text.find("Breakdown by discipline"), std::string::npos);
  EXPECT_NE(text.find("Pseudo-R² (McFadden)"), std::string::npos);
  EXPECT_NE(text.find("Missing artifacts: none"), std::string::npos);

  const auto est = csv::read_file((run.out / "estimates.csv").string());
  const int beta = est.column("beta"), pairs = est.column("n_pairs");
  ASSERT_GE(beta, 0);
  for (const auto& row : est.rows) {
    EXPECT_NE(text.find(row[beta]), std::string::npos) << row[beta];
    EXPECT_NE(text.find(row[pairs]), std::string::npos);
  }

  write_report(run.out.string());
  EXPECT_TRUE(fs::exists(run.out / "report.txt"));
  const auto sub = csv::read_file((run.out / "subgroups.csv").string());
  EXPECT_GE(sub.column("n_pairs"), 0);
  EXPECT_GE(sub.column("dimension"), 0);
  EXPECT_FALSE(sub.rows.empty());
  const auto ev = csv::read_file((run.out / "event_series.csv").string());
  EXPECT_FALSE(ev.rows.empty());
}

TEST(Report, UnfittedLogitIsReportedNotMissing) {
  // The small corpus separates perfectly, so no logit table is written.
  const auto run = fixture::make_synth_run("report_small");
  ASSERT_EQ(run_pipeline(load_pipeline_config(run.config.string())).exit_code, 0);
  ASSERT_TRUE(fs::exists(run.out / "logit_pubs.error.txt"));
  const auto report = build_report(run.out.string());
  EXPECT_TRUE(report.missing.empty());
  EXPECT_NE(report.text.find("Logit (pubs): not estimated"), std::string::npos);
}

TEST(Report, EmptyDirectoryListsMissingArtifacts) {
  const auto dir = fixture::temp_dir("report_empty");
  RunReport report;
  ASSERT_NO_THROW(report = write_report(dir.string()));
  EXPECT_FALSE(report.missing.empty());
  EXPECT_NE(report.text.find("estimates.csv"), std::string::npos);
  EXPECT_EQ(report.text.find("Missing artifacts: none"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
}

TEST(Report, EchoesFailureMarker) {
  const auto dir = fixture::temp_dir("report_failed");
  std::ofstream(dir / "FAILED") << "stage: match\nerror: boom\n";
  const auto report = build_report(dir.string());
  EXPECT_NE(report.text.find("boom"), std::string::npos);
}
