#pragma once

// End-to-end driver: ingest -> groups -> match -> estimate -> report, with a
// run manifest. Stage helpers are exposed for the CLI subcommands.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/did.hpp"
#include "hatmatch/env_metrics.hpp"
#include "hatmatch/fixed_effects.hpp"
#include "hatmatch/logit.hpp"
#include "hatmatch/matching.hpp"
#include "hatmatch/mobility.hpp"

namespace hatmatch {

struct PipelineConfig {
  std::string config_path;
  std::vector<std::string> works;  // resolved paths
  std::vector<std::string> works_as_written;
  WorksFormat format = WorksFormat::Flat;
  std::string roster;
  std::string roster_as_written;
  std::string destination = "CN";
  PoolCaps caps;
  ExactTolerances tolerances;
  DidWindow window;  // pre [-4, 0] and post [1, 9] joined
  MatchMethod method = MatchMethod::SCM;
  double gate_factor = 0.5;
  int dom_k = 40;
  SeType se = SeType::Clustered;
  std::uint64_t seed = 0;
  std::string output_dir;
  IngestOptions ingest;
  EligibilityPolicy eligibility;
  bool include_self_citations = true;
  std::string canonical_json;  // normalised config, hashed into the manifest
};

// Throws ConfigError on schema violations. Relative paths resolve against
// base_dir.
PipelineConfig pipeline_config_from_json(const std::string& text, const std::string& base_dir);
PipelineConfig load_pipeline_config(const std::string& path);

// Throws InvalidInput naming the first missing input file.
void check_inputs(const PipelineConfig& config);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Stage helpers.
struct IngestOutput {
  PanelMap panels;  // eligible only
  CorpusStats stats;
};
IngestOutput run_ingest(const PipelineConfig& config);

GroupAssignment run_groups(const PipelineConfig& config, const PanelMap& panels);

std::vector<CandidatePool> build_pools(const PanelMap& panels, const GroupAssignment& groups,
                                       PoolKind kind, const PipelineConfig& config);

MatchedSet refine_pools(const std::vector<CandidatePool>& pools, const PanelMap& panels,
                        OutcomeKind kind, const PipelineConfig& config);

std::string comparison_label(PoolKind kind);  // "G_w vs G_1" / "G_w vs G_2"

struct ModelRun {
  EstimateRow main;
  std::vector<EstimateRow> subgroups;  // by discipline, then by cohort
  EventStudyEstimate event;
  int n_obs = 0;
};
ModelRun estimate_models(const MatchedSet& matched, const PanelMap& panels,
                         const PipelineConfig& config);

struct SuccessData {
  std::vector<DeltaRow> deltas;
  std::vector<SuccessOutcome> outcomes;
  std::vector<LogitDesignRow> rows_pubs, rows_cites;
  double median_pubs = 0.0, median_cites = 0.0;
  std::map<std::string, int> excluded;  // reason -> pooled observations dropped
};
// Pools G_w with every contender of both unrefined step-one pools.
SuccessData build_success_data(const PanelMap& panels, const GroupAssignment& groups,
                               const std::vector<CandidatePool>& moved,
                               const std::vector<CandidatePool>& unmoved,
                               const PipelineConfig& config);

// Counters and warnings gathered by the stage functions for the manifest.
struct StageLog {
  std::map<std::string, std::int64_t> counts;  // "pairs/moved/pubs" -> n
  std::vector<std::string> warnings;
};

// Each stage writes its artifacts into config.output_dir.
IngestOutput stage_ingest(const PipelineConfig& config, StageLog& log);
GroupAssignment stage_groups(const PipelineConfig& config, const PanelMap& panels, StageLog& log);

struct MatchRun {
  PoolKind pool = PoolKind::Moved;
  OutcomeKind outcome = OutcomeKind::Publications;
  std::vector<CandidatePool> pools;  // unrefined step-one pools
  MatchedSet exact, refined;
};
// One run per pool x outcome, refined concurrently.
std::vector<MatchRun> stage_match(const PipelineConfig& config, const PanelMap& panels,
                                  const GroupAssignment& groups, StageLog& log);
// Rebuilds the runs from matches_*.jsonl in the output directory.
std::vector<MatchRun> load_match_runs(const PipelineConfig& config);
void stage_estimate(const PipelineConfig& config, const PanelMap& panels,
                    const GroupAssignment& groups, const std::vector<MatchRun>& runs,
                    StageLog& log);

struct PipelineStatus {
  int exit_code = 0;  // 0 ok, 1 stage failure, 2 config/input error
  std::string failed_stage;
  std::string message;
};

// Writes every artifact into config.output_dir. On a stage failure the
// artifacts written so far are kept next to a FAILED marker.
PipelineStatus run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

// Artifact names.
std::string matches_file(PoolKind kind, OutcomeKind outcome);
std::string balance_file(PoolKind kind, OutcomeKind outcome);
std::string event_file(PoolKind kind, OutcomeKind outcome);

}  // namespace hatmatch
