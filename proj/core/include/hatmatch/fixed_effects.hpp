#pragma once

// Weighted least squares with unit and period fixed effects.

#include <string>
#include <vector>

namespace hatmatch {

enum class SeType { Classical, Robust, Clustered };
std::string to_string(SeType t);
SeType parse_se_type(const std::string& s);

// Two numerically independent routes to the same estimator.
enum class FeSolver {
  Within,  // alternating weighted demeaning, then OLS on the residualised data
  Dummy    // explicit unit and period dummies, dense QR
};

struct FeDesign {
  std::vector<double> y;
  std::vector<double> weights;                   // analytic weights, > 0
  std::vector<std::vector<double>> regressors;   // column-major: k columns of length n
  std::vector<std::string> regressor_names;
  std::vector<int> unit;     // dense 0..U-1
  std::vector<int> period;   // dense 0..T-1
  std::vector<int> cluster;  // dense 0..G-1
};

struct FeResult {
  std::vector<double> coef;
  std::vector<double> se;
  std::vector<std::vector<double>> vcov;
  double r2 = 0.0;         // overall, dummy-inclusive fit
  double ssr = 0.0;
  int n_obs = 0;
  int n_units = 0;
  int n_periods = 0;
  int n_clusters = 0;
  double dof = 0.0;        // degrees of freedom used for p-values
  bool zero_variance = false;
};

// Throws DegenerateFitError naming the offending dimension ("units",
// "periods", or a regressor name) when the coefficient is not identified.
FeResult fit_two_way_fe(const FeDesign& design, SeType se_type = SeType::Clustered,
                        FeSolver solver = FeSolver::Within);

}  // namespace hatmatch
