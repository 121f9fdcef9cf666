#pragma once

// Stacked matched panels, two-way fixed-effects DID and the event study.

#include <span>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/fixed_effects.hpp"
#include "hatmatch/matching.hpp"

namespace hatmatch {

struct PanelObservation {
  std::string scientist_id;  // fixed-effect unit (entry-scoped)
  std::string cluster_id;    // author id
  int t = 0;                 // year relative to Y_w
  double y = 0.0;
  bool treat = false;
  bool post = false;         // t >= 1
  double weight = 1.0;
  std::string discipline;    // of the entry's treated unit
  Year cohort_year = 0;      // Y_w of the entry's treated unit
};

struct DidWindow {
  int first = -4;
  int last = 9;
};

struct DidPanel {
  std::vector<PanelObservation> rows;
  int n_pairs = 0;
  int truncated_units = 0;   // units missing years past the corpus horizon
  int short_post_units = 0;  // treated units with fewer than two post years
};

// Treated rows carry weight 1; control rows carry their match weight.
// Citations enter as log(1 + C).
DidPanel build_did_panel(const MatchedSet& matched, const PanelMap& panels, Year corpus_first,
                         Year corpus_last, const DidWindow& window = {});

struct DidOptions {
  SeType se = SeType::Clustered;
  FeSolver solver = FeSolver::Within;
};

struct DIDEstimate {
  double beta1 = 0.0;
  double se = 0.0;
  double p = 1.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // beta +/- 1.96 se
  double r2 = 0.0;                  // overall, dummy-inclusive
  int n_obs = 0;
  int n_pairs = 0;
  int n_clusters = 0;
  std::vector<std::string> flags;
};

DIDEstimate twfe_did(std::span<const PanelObservation> obs, const DidOptions& options = {});

struct HorizonEffect {
  int horizon = 0;
  double beta = 0.0, se = 0.0, p = 1.0, ci_lo = 0.0, ci_hi = 0.0;
  bool present = false;  // false when no treated observation exists at this horizon
};

struct EventStudyEstimate {
  std::vector<HorizonEffect> horizons;  // one per requested horizon, in order
  int n_obs = 0;
  std::vector<std::string> flags;
};

EventStudyEstimate event_study(std::span<const PanelObservation> obs, int first_horizon = 1,
                               int last_horizon = 9, const DidOptions& options = {});

struct EstimateRow {
  std::string model;       // did
  std::string comparison;  // "G_w vs G_1" / "G_w vs G_2"
  std::string method;      // scm / cem / dom
  std::string outcome;     // pubs / cites
  std::string subset;      // "all", "discipline=...", "cohort=..."
  DIDEstimate estimate;
};

// Columns: model, comparison, method, outcome, subset, beta, se, p, stars,
// n_pairs, n_obs, r2, flags.
void write_estimates_csv(const std::string& path, const std::vector<EstimateRow>& rows);
void write_event_csv(const std::string& path, const EventStudyEstimate& es);

}  // namespace hatmatch
