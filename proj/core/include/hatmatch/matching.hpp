#pragma once

// Two-step matching: exact pre-filter into capped candidate pools, then a
// refining step (SCM weights, CEM strata or DOM pairs) summarised as a
// MatchedSet.

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/mobility.hpp"
#include "hatmatch/scm.hpp"
#include "hatmatch/series.hpp"

namespace hatmatch {

enum class PoolKind { Moved, Unmoved };
std::string to_string(PoolKind kind);  // "moved" / "unmoved"
PoolKind parse_pool_kind(const std::string& s);

struct PoolCaps {
  int moved = 200;
  int unmoved = 300;
  int for_kind(PoolKind k) const { return k == PoolKind::Moved ? moved : unmoved; }
};

struct ExactTolerances {
  int y0 = 1;         // |career start difference|
  int y_w = 1;        // |movement year difference| for moved contenders
  int pre_years = 5;  // totals over [Y_w - pre_years, Y_w - 1]
};

// floor(log2(1 + x)).
int log2_bin(double x);

struct Contender {
  const AuthorYearPanel* panel = nullptr;
  Group group = Group::None;
  std::optional<Year> y_w;
};

struct PoolMember {
  AuthorId id;
  Year align_year = 0;  // own Y_w (moved) or the treated unit's Y_w (unmoved)
  bool operator==(const PoolMember&) const = default;
};

struct CandidatePool {
  AuthorId treated_id;
  Year treated_y_w = 0;
  PoolKind kind = PoolKind::Moved;
  std::vector<PoolMember> contenders;  // sorted by id
  bool caps_applied = false;
  int survivors = 0;  // before capping
};

// Hard filters: same discipline, |dY0| <= tol, same log2 bins of pre-window
// publication and citation totals, plus the pool rule (moved: |dY_w| <= tol;
// unmoved: last publication year > treated Y_w). Contenders from the wrong
// group are ignored. When more than the cap survive, a uniform subset keyed by
// (seed, treated id, contender id) is kept; a larger cap keeps a superset.
CandidatePool exact_match(const AuthorYearPanel& treated, Year treated_y_w,
                          std::span<const Contender> pool, PoolKind kind,
                          const PoolCaps& caps = {}, const ExactTolerances& tol = {},
                          std::uint64_t seed = 0);

enum class MatchMethod { Exact, SCM, CEM, DOM };
std::string to_string(MatchMethod m);  // "exact", "scm", "cem", "dom"
MatchMethod parse_match_method(const std::string& s);

struct MatchedUnit {
  AuthorId id;
  Year align_year = 0;
  double weight = 1.0;
};

struct MatchedEntry {
  std::string key;  // treated id for exact/SCM/DOM; stratum signature for CEM
  std::vector<MatchedUnit> treated;
  std::vector<MatchedUnit> controls;
  double pre_rmspe = std::numeric_limits<double>::quiet_NaN();
  double distance = std::numeric_limits<double>::quiet_NaN();
  bool converged = true;
  std::vector<std::string> flags;
};

struct MatchedSet {
  MatchMethod method = MatchMethod::SCM;
  OutcomeKind outcome_kind = OutcomeKind::Publications;
  PoolKind pool_kind = PoolKind::Moved;
  std::vector<MatchedEntry> entries;
  std::map<std::string, int> failures;  // reason -> treated units lost

  // Treated units carrying a counterfactual.
  int n_pairs() const;
};

// The exact stage as a MatchedSet (every contender weight 1).
MatchedSet exact_stage_set(std::span<const CandidatePool> pools, OutcomeKind kind);

struct RefineOptions {
  double gate_factor = 0.5;   // drop fits with pre_rmspe > gate_factor * sd(treated pre outcome)
  double min_weight = 1e-8;   // donors below this weight are not carried as controls
  ScmOptions scm;
};

struct ScmRefinement {
  MatchedSet matched;
  std::vector<SCMWeights> fits;  // every attempted fit, including gated ones
};

ScmRefinement refine_scm(std::span<const CandidatePool> pools, const PanelMap& panels,
                         OutcomeKind kind, const RefineOptions& options = {});

// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

// matches JSONL: one entry per line.
void write_matches_jsonl(const std::string& path, const MatchedSet& set,
                         std::span<const CandidatePool> pools = {});
struct MatchesFile {
  MatchedSet matched;
  std::vector<CandidatePool> pools;
};
MatchesFile read_matches_jsonl(const std::string& path);

}  // namespace hatmatch
