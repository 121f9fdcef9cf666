#pragma once

// Coarsened exact matching over yearly pre-period covariates.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/matching.hpp"
#include "hatmatch/series.hpp"

namespace hatmatch {

struct CemUnit {
  AuthorId id;
  Year align_year = 0;
  bool treated = false;
  std::vector<double> covariates;
};

// Empty cutpoints: floor(log2(1 + x)) bins. Otherwise bin = number of
// cutpoints <= x, shared by every covariate.
struct Coarsening {
  std::vector<double> cutpoints;
};

using CemSignature = std::vector<int>;

CemSignature cem_signature(std::span<const double> covariates, const Coarsening& coarsening = {});

struct CemStratum {
  std::vector<std::size_t> treated;   // indices into the unit list
  std::vector<std::size_t> controls;
};

struct CEMSolution {
  std::map<CemSignature, CemStratum> strata;  // retained strata only
  std::vector<char> retained;                 // per unit
  std::vector<double> weights;                // per unit; 0 when pruned
  int matched_treated = 0;                    // m_T
  int matched_controls = 0;                   // m_C
  int pruned_strata = 0;
};

// Treated weights are 1; a control in stratum s gets (m_C/m_T)(m_T^s/m_C^s).
CEMSolution cem_match(std::span<const CemUnit> units, const Coarsening& coarsening = {});

// (P_{-4..0}, C_{-4..0}).
std::vector<double> cem_covariates(const PreSeries& series);

// Builds CEM units from the exact-step pools (treated units plus every
// distinct (contender, alignment year)) and turns the solution into a
// MatchedSet with one entry per retained stratum.
MatchedSet refine_cem(std::span<const CandidatePool> pools, const PanelMap& panels,
                      OutcomeKind kind, const Coarsening& coarsening = {});

std::string signature_key(const CemSignature& sig);

}  // namespace hatmatch
