#pragma once

// Pre-period balance: per relative year, the group coefficient of a weighted
// regression of the outcome on a treated indicator.

#include <limits>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"
#include "hatmatch/matching.hpp"

namespace hatmatch {

struct BalanceCell {
  double coef = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  int n_obs = 0;
  bool degenerate = false;  // one group missing: blank cell
};

// y = a + b * group with analytic weights; classical SEs, t(n - 2) p-values.
BalanceCell group_difference(const std::vector<double>& y, const std::vector<int>& group,
                             const std::vector<double>& weights);

struct BalanceRow {
  int t = 0;
  BalanceCell exact;
  BalanceCell refined;
};

// Citations enter as log(1 + C), as in the DID outcome.
std::vector<BalanceRow> balance_table(const MatchedSet& exact_stage, const MatchedSet& refined,
                                      const PanelMap& panels, OutcomeKind kind, int t_from = -4,
                                      int t_to = 0);

// Columns: year, coef_exact, se_exact, stars_exact, coef_refined, se_refined,
// stars_refined, n_exact, n_refined, flags.
void write_balance_csv(const std::string& path, const std::vector<BalanceRow>& rows);

}  // namespace hatmatch
