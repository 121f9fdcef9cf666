#pragma once

// Synthetic control weights: min ||x - X w||^2 over the probability simplex.

#include <span>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/series.hpp"

namespace hatmatch {

struct ScmOptions {
  double tolerance = 1e-10;   // stop when the objective improves by less
  int max_iterations = 10000;
  bool active_set_polish = true;
};

struct SimplexLsResult {
  std::vector<double> weights;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Euclidean projection onto {w >= 0, sum w = 1}.
std::vector<double> project_to_simplex(std::span<const double> v);

// Accelerated projected gradient with adaptive restart, followed by an
// active-set pass that enforces the KKT conditions exactly. columns[j] is
// donor j's predictor vector; all must have target.size() entries.
SimplexLsResult simplex_least_squares(std::span<const double> target,
                                      const std::vector<std::vector<double>>& columns,
                                      const ScmOptions& options = {});

struct SCMWeights {
  AuthorId treated_id;
  std::vector<AuthorId> donor_ids;
  std::vector<double> weights;
  double pre_rmspe = 0.0;
  double objective = 0.0;
  OutcomeKind outcome_kind = OutcomeKind::Publications;
  int iterations = 0;
  bool converged = false;
};

// Root-mean-square of treated minus weighted-donor outcomes.
double pre_rmspe(std::span<const double> treated_outcomes,
                 const std::vector<std::vector<double>>& donor_outcomes,
                 std::span<const double> weights);

struct ScmProblem {
  std::vector<double> treated_predictors;
  std::vector<std::vector<double>> donor_predictors;
  std::vector<double> treated_outcomes;               // pre-period, for RMSPE
  std::vector<std::vector<double>> donor_outcomes;
};

// Throws InvalidInput when there are no donors or dimensions disagree. A fit
// that hits the iteration limit comes back with converged = false.
SCMWeights scm_fit(const ScmProblem& problem, const ScmOptions& options = {});

// Predictors and outcomes coincide.
SCMWeights scm_fit(std::span<const double> treated_series,
                   const std::vector<std::vector<double>>& donor_series,
                   const ScmOptions& options = {});

// (P_{-4..0}, mean C_{-4..0}) for publications; (C_{-4..0}, mean P_{-4..0})
// for citations.
std::vector<double> scm_predictors(const PreSeries& series, OutcomeKind kind);

}  // namespace hatmatch
