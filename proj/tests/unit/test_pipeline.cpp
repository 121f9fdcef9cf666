#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/pipeline.hpp"
#include "synth_run.hpp"

using namespace hatmatch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double did_beta(const fs::path& dir, const std::string& comparison, const std::string& outcome) {
  const auto est = csv::read_file((dir / "estimates.csv").string());
  for (const auto& row : est.rows)
    if (row[est.column("model")] == "did" && row[est.column("subset")] == "all" &&
        row[est.column("comparison")] == comparison && row[est.column("outcome")] == outcome)
      return std::stod(row[est.column("beta")]);
  ADD_FAILURE() << "no did row for " << comparison << " " << outcome;
  return 0.0;
}

}  // namespace

TEST(PipelineConfig, DefaultsAndRelativePaths) {
  const auto c = pipeline_config_from_json(fixture::run_config_json("out").dump(), "/data/x");
  ASSERT_EQ(c.works.size(), 1u);
  EXPECT_EQ(c.works[0], "/data/x/works.jsonl");
  EXPECT_EQ(c.roster, "/data/x/roster.csv");
  EXPECT_EQ(c.output_dir, "/data/x/out");
  EXPECT_EQ(c.method, MatchMethod::SCM);
  EXPECT_EQ(c.se, SeType::Clustered);
  EXPECT_EQ(c.caps.moved, 200);
  EXPECT_EQ(c.caps.unmoved, 300);
  EXPECT_EQ(c.seed, 7u);
}

TEST(PipelineConfig, SchemaViolationsAreConfigErrors) {
  auto bad = [](auto patch) {
    auto j = fixture::run_config_json("out");
    patch(j);
    return j.dump();
  };
  EXPECT_THROW(pipeline_config_from_json(bad([](json& j) { j["colour"] = "red"; }), "."), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(bad([](json& j) { j["inputs"].erase("roster"); }), "."),
               ConfigError);
  EXPECT_THROW(pipeline_config_from_json(bad([](json& j) { j["caps"] = {{"moved", 0}}; }), "."),
               ConfigError);
  EXPECT_THROW(pipeline_config_from_json(bad([](json& j) { j["seed"] = -3; }), "."), ConfigError);
  EXPECT_THROW(pipeline_config_from_json(bad([](json& j) { j["match"] = {{"method", "psm"}}; }), "."),
               ConfigError);
  EXPECT_THROW(pipeline_config_from_json(bad([](json& j) { j["estimate"] = {{"se", "hc9"}}; }), "."),
               ConfigError);
  EXPECT_THROW(pipeline_config_from_json("[1, 2]", "."), ConfigError);
}

TEST(Pipeline, MissingInputExitsWithCodeTwoAndNamesPath) {
  const auto run = fixture::make_synth_run("pipe_missing");
  fs::remove(run.dir / "roster.csv");
  const auto status = run_pipeline(load_pipeline_config(run.config.string()));
  EXPECT_EQ(status.exit_code, 2);
  EXPECT_NE(status.message.find((run.dir / "roster.csv").string()), std::string::npos) << status.message;
}

TEST(Pipeline, RunWritesArtifactsAndManifest) {
  const auto run = fixture::make_synth_run("pipe_run");
  std::ostringstream log;
  const auto status = run_pipeline(load_pipeline_config(run.config.string()), &log);
  ASSERT_EQ(status.exit_code, 0) << status.message;
  for (const char* f : {"panels.jsonl", "labels.csv", "estimates.csv", "manifest.json", "report.txt",
                        "matches_moved_pubs.jsonl", "balance_unmoved_cites.csv", "event_moved_pubs.csv",
                        "deltas.csv", "outcomes.csv"})
    EXPECT_TRUE(fs::exists(run.out / f)) << f;
  for (const char* outcome : {"pubs", "cites"}) {
    const bool fitted = fs::exists(run.out / ("logit_" + std::string(outcome) + ".csv"));
    const bool explained = fs::exists(run.out / ("logit_" + std::string(outcome) + ".error.txt"));
    EXPECT_NE(fitted, explained) << outcome;
    EXPECT_EQ(fitted, fs::exists(run.out / ("margins_" + std::string(outcome) + ".csv"))) << outcome;
  }
  EXPECT_FALSE(fs::exists(run.out / "FAILED"));
  const auto manifest = json::parse(fixture::slurp(run.out / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["method"], "scm");
  EXPECT_EQ(manifest["config_sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(manifest["inputs"].size(), 2u);
  EXPECT_NEAR(did_beta(run.out, "G_w vs G_1", "pubs"), 2.0, 1e-8);
  EXPECT_NEAR(did_beta(run.out, "G_w vs G_2", "pubs"), 2.0, 1e-8);
}

TEST(Pipeline, SameSeedGivesByteIdenticalArtifacts) {
  const auto run = fixture::make_synth_run("pipe_repeat");
  const auto config = load_pipeline_config(run.config.string());
  ASSERT_EQ(run_pipeline(config).exit_code, 0);
  const auto first = fixture::slurp(run.out / "estimates.csv");
  const auto matches = fixture::slurp(run.out / "matches_unmoved_pubs.jsonl");
  ASSERT_EQ(run_pipeline(config).exit_code, 0);
  EXPECT_EQ(first, fixture::slurp(run.out / "estimates.csv"));
  EXPECT_EQ(matches, fixture::slurp(run.out / "matches_unmoved_pubs.jsonl"));
}

TEST(Pipeline, StageFailureLeavesMarker) {
  const auto run = fixture::make_synth_run("pipe_fail");
  std::ofstream(run.dir / "roster.csv") << "no,such,columns\n1,2,3\n";
  const auto status = run_pipeline(load_pipeline_config(run.config.string()));
  EXPECT_EQ(status.exit_code, 1) << status.message;
  ASSERT_TRUE(fs::exists(run.out / "FAILED"));
  const auto marker = fixture::slurp(run.out / "FAILED");
  EXPECT_EQ(marker.rfind("stage: " + status.failed_stage, 0), 0u) << marker;
}

TEST(Pipeline, LargerPlantedEffectGivesLargerEstimate) {
  double previous = -1.0;
  for (double delta : {0.0, 1.0, 3.0}) {
    auto synth = fixture::small_synth();
    synth.delta_pub = delta;
    const auto run = fixture::make_synth_run("pipe_delta", synth);
    ASSERT_EQ(run_pipeline(load_pipeline_config(run.config.string())).exit_code, 0);
    const double beta = did_beta(run.out, "G_w vs G_2", "pubs");
    EXPECT_NEAR(beta, delta, 1e-8);
    EXPECT_GT(beta, previous);
    previous = beta;
  }
}

TEST(Pipeline, AlternativeMethodsRun) {
  for (const char* method : {"exact", "cem", "dom"}) {
    const auto run = fixture::make_synth_run(std::string("pipe_") + method, fixture::small_synth(),
                                             [&](json& j) { j["match"] = {{"method", method}}; });
    const auto status = run_pipeline(load_pipeline_config(run.config.string()));
    EXPECT_EQ(status.exit_code, 0) << method << ": " << status.message;
    EXPECT_TRUE(fs::exists(run.out / "estimates.csv")) << method;
  }
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
