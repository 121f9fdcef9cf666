#pragma once

// Synthetic corpora with planted movers, talents and treatment effects.
//
// Authors live in isolated cells (discipline x career-start band). Inside the
// matching windows every author's yearly publications follow
// level + slope * calendar year, and citations follow the same additive form,
// so a two-way fixed-effects model is exactly specified. Talents add the
// planted post-move effect. Pool members sit on a grid of level offsets around
// the talents, so most talents are exact convex combinations of designated
// donors, while low "decoy" members make the unrefined pools imbalanced.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/did.hpp"
#include "hatmatch/mobility.hpp"

namespace hatmatch {

struct SynthConfig {
  std::uint64_t seed = 0;
  bool has_seed = false;  // the JSON form must name a seed
  int n_talents = 40;
  int n_movers = 60;
  int n_stayers = 100;
  int n_near_miss = 0;  // two-year foreign run, then destination: not movers
  int n_disciplines = 4;
  Year first_year = 2000;
  Year last_year = 2021;
  std::vector<Year> cohorts{2011, 2012, 2013};
  std::string destination = "CN";
  std::vector<std::string> origins{"US", "GB", "DE", "JP"};
  // Planted effects on talents for post years T = 1..9 (beyond 9: last value).
  double delta_pub = 2.0;
  std::vector<double> delta_pub_profile;  // overrides delta_pub when non-empty
  double delta_cite = 0.3;                // log scale, multiplicative
  bool noiseless = true;
  // Baseline processes: yearly mean = author level + slope * (year - 2005).
  double pub_slope = 1.0;
  double cite_slope = 2.0;
  double pub_level = 12.0;   // relative level at the alignment year
  double cite_level = 25.0;
  double convex_fraction = 1.0;
  // Turnover rates: 0.5 + slope * z + N(0, noise^2), clipped to [0, 1];
  // z is the author's scaled publication-level offset.
  double turnover_a_slope = 0.15;
  double turnover_c_slope = -0.15;
  double turnover_noise = 0.1;

  double effect_at(int horizon) const;  // planted publication effect at T >= 1
};

// Throws ConfigError naming the offending key.
SynthConfig synth_config_from_json(const std::string& text);
SynthConfig read_synth_config(const std::string& path);
void validate_synth_config(const SynthConfig& config);

enum class SynthRole { Talent, Mover, Stayer, NearMiss };
std::string to_string(SynthRole role);

struct SynthAuthor {
  AuthorId id;
  SynthRole role = SynthRole::Stayer;
  int cell = -1;
  std::string discipline;
  Year y0 = 0;
  std::optional<Year> move_year;  // talents and movers
  Year align_year = 0;            // move year, or the cell cohort for stayers
  std::string origin;
  double pub_offset = 0.0;   // relative to the cell's publication level
  double cite_offset = 0.0;
  double tau_a = 0.0, tau_i = 0.0, tau_c = 0.0;
  int team_pre = 1, team_post = 1;  // coauthors per paper in each window
  // Realised environment changes around align_year (pipeline windows).
  double d_a = 0.0, d_i = 0.0, d_c = 0.0, d_size = 0.0;
  bool convex = false;  // talent placed inside its pools' convex hull
};

struct PlantedCombination {
  AuthorId treated;
  std::string pool;  // "moved" / "unmoved"
  std::vector<AuthorId> donors;
  std::vector<double> weights;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  bool noiseless = true;
  std::vector<double> pub_effects;  // T = 1..9
  double delta_cite = 0.0;
  std::vector<SynthAuthor> authors;  // sorted by id
  std::vector<PlantedCombination> combinations;
  std::map<std::string, int> logit_signs;  // predictor -> planted sign (+1 / -1)
  // Latent yearly means per author (before noise).
  std::map<AuthorId, std::map<Year, double>> pub_means;
  std::map<AuthorId, std::map<Year, double>> cite_means;

  std::vector<AuthorId> movers() const;  // talents and movers
  const SynthAuthor* find(const AuthorId& id) const;
};

struct SynthCorpus {
  std::vector<PublicationRecord> records;
  std::vector<RosterEntry> roster;
  GroundTruth truth;
};

SynthCorpus generate(const SynthConfig& config);

// Writes works.jsonl (flat format), roster.csv and truth.json into dir.
void write_synth_corpus(const std::string& dir, const SynthCorpus& corpus);
std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth read_ground_truth(const std::string& path);

// Stacked DID panel with planted effects, for estimator checks: each stack
// has one treated unit and `controls` control units over t = first..last.
// y = unit effect + stack-free period effect + effect(t) * treat * post + noise,
// with AR(1) noise inside each unit.
struct PlantedPanelConfig {
  int n_treated = 30;
  int controls = 2;
  int first_t = -4;
  int last_t = 9;
  std::vector<double> effects;  // index T - 1 for T >= 1; missing -> 0
  double sigma = 0.0;
  double ar1 = 0.0;
  bool random_weights = false;  // control weights on the simplex, else 1 / controls
  std::uint64_t seed = 1;
};

std::vector<PanelObservation> planted_did_panel(const PlantedPanelConfig& config);

}  // namespace hatmatch
