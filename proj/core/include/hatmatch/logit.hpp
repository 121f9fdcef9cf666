#pragma once

// Logistic regression of post-move success by IRLS, with margins.

#include <span>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"

namespace hatmatch {

struct LogitDesignRow {
  AuthorId author_id;
  int label = 0;
  double d_a = 0.0, d_i = 0.0, d_c = 0.0, d_size = 0.0;
  std::string y0;          // categorical
  std::string y_w;         // categorical
  std::string discipline;  // categorical
  std::string group;       // G_w / G_1 / G_2
};

struct LogitOptions {
  int max_iter = 100;
  double tol = 1e-10;         // |delta log-likelihood|
  double divergence = 1e3;    // max |beta| before declaring separation
  int min_level_rows = 2;     // rarer categorical levels collapse into "other"
};

struct LogitFactor {
  std::string name;                 // Y_0, Y_w, discipline, group
  std::vector<std::string> levels;  // sorted; levels[0] is the reference
  std::string mode;                 // most frequent level (ties: first in sort order)
  std::vector<std::string> collapsed;
};

struct LogitEstimate {
  std::vector<std::string> names;  // "(Intercept)", continuous, then "<factor>=<level>"
  std::vector<double> coef;
  std::vector<double> se;
  std::vector<double> p;  // Wald, normal
  std::vector<std::vector<double>> vcov;
  double loglik = 0.0;
  double loglik_null = 0.0;
  double pseudo_r2 = 0.0;  // McFadden
  int n_obs = 0;
  int iterations = 0;
  bool converged = false;
  bool quasi_separation = false;
  std::vector<double> loglik_history;  // at the start and after every accepted step

  // Covariate profile used by margins().
  std::vector<std::string> continuous;
  std::vector<double> means, mins, maxs;
  std::vector<LogitFactor> factors;
  std::vector<std::string> log;  // collapsed levels, aliased columns

  int index_of(const std::string& name) const;  // -1 when absent
};

// Continuous predictors D_A, D_I, D_C, D_size plus dummy-coded Y_0, Y_w,
// discipline and group. Factors with a single level after collapsing add no
// column; columns aliased by earlier ones are dropped and logged.
LogitEstimate logit_fit(std::span<const LogitDesignRow> rows, const LogitOptions& options = {});

// Plain design matrix route: x[i] is row i (include a column of ones for an
// intercept). Aliased columns throw DegenerateFitError.
LogitEstimate logit_fit_matrix(const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y, const std::vector<std::string>& names,
                               const LogitOptions& options = {});

double logistic(double eta);

struct MarginPoint {
  std::string predictor;
  std::string value;  // grid value or factor level
  double probability = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // delta method, clamped to [0, 1]
  bool extrapolated = false;
};

// Other continuous predictors at their means, categoricals at their modes.
std::vector<MarginPoint> margins(const LogitEstimate& est, const std::string& predictor,
                                 std::span<const double> grid);
std::vector<MarginPoint> margins_by_level(const LogitEstimate& est, const std::string& factor);

// Evenly spaced grid over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int points);

// Columns: term, coef, se, p, stars, n_obs, loglik, pseudo_r2.
void write_logit_csv(const std::string& path, const LogitEstimate& est);
// Columns: predictor, value, probability, ci_lo, ci_hi, flags.
void write_margins_csv(const std::string& path, const std::vector<MarginPoint>& points);

}  // namespace hatmatch
