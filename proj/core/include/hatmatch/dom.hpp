#pragma once

// Distance-based optimal matching: k nearest candidates per treated unit under
// a log-count distance, then a minimum-cost one-to-one assignment.

#include <span>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/matching.hpp"
#include "hatmatch/series.hpp"

namespace hatmatch {

// sum_{t=-4..0} [(ln(1+P_a) - ln(1+P_b))^2 + (ln(1+C_a) - ln(1+C_b))^2] / divisor.
// The default divisor is 12.
double dom_distance(const PreSeries& a, const PreSeries& b, double divisor = 12.0);

struct DomCandidate {
  AuthorId id;
  Year align_year = 0;
  PreSeries series;
};

struct DomTreated {
  AuthorId id;
  Year y_w = 0;
  PreSeries series;
  std::vector<DomCandidate> pool;
};

struct DomPair {
  AuthorId treated_id;
  AuthorId control_id;
  Year treated_y_w = 0;
  Year control_align_year = 0;
  double distance = 0.0;
};

struct DOMSolution {
  std::vector<DomPair> pairs;  // in treated input order
  std::vector<AuthorId> unmatched_treated;
  double total_distance = 0.0;
};

// Each control (by author id) is used at most once.
DOMSolution dom_match(std::span<const DomTreated> treated, int k = 40, double divisor = 12.0);

MatchedSet refine_dom(std::span<const CandidatePool> pools, const PanelMap& panels,
                      OutcomeKind kind, int k = 40);

}  // namespace hatmatch
