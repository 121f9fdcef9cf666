#include "hatmatch/balance.hpp"

#include <cmath>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/stats.hpp"

namespace hatmatch {

BalanceCell group_difference(const std::vector<double>& y, const std::vector<int>& group,
                             const std::vector<double>& weights) {
  BalanceCell cell;
  cell.n_obs = static_cast<int>(y.size());
  double w1 = 0, w0 = 0, s1 = 0, s0 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (group[i]) {
      w1 += weights[i];
      s1 += weights[i] * y[i];
    } else {
      w0 += weights[i];
      s0 += weights[i] * y[i];
    }
  }
  if (w1 <= 0.0 || w0 <= 0.0) {
    cell.degenerate = true;
    return cell;
  }
  const double m1 = s1 / w1, m0 = s0 / w0;
  cell.coef = m1 - m0;
  double ssr = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (group[i] ? m1 : m0);
    ssr += weights[i] * e * e;
  }
  const double dof = static_cast<double>(y.size()) - 2.0;
  if (dof <= 0.0) {
    cell.degenerate = true;
    return cell;
  }
  const double sigma2 = ssr / dof;
  // Var(b) = sigma^2 / sum w (g - gbar)^2 = sigma^2 (1/w1 + 1/w0).
  cell.se = std::sqrt(sigma2 * (1.0 / w1 + 1.0 / w0));
  if (cell.se > 0.0) {
    cell.p = p_value_t(cell.coef / cell.se, dof);
  } else {
    cell.p = cell.coef == 0.0 ? 1.0 : 0.0;
  }
  return cell;
}

namespace {

BalanceCell stage_cell(const MatchedSet& set, const PanelMap& panels, OutcomeKind kind, int t) {
  std::vector<double> y, w;
  std::vector<int> g;
  auto push = [&](const MatchedUnit& u, int is_treated) {
    auto it = panels.find(u.id);
    if (it == panels.end()) throw InvalidInput("balance: unit missing from panels: " + u.id);
    const auto raw = relative_counts(it->second, kind, u.align_year, t, t);
    y.push_back(outcome_value(kind, raw[0]));
    g.push_back(is_treated);
    w.push_back(u.weight);
  };
  for (const auto& e : set.entries) {
    if (e.controls.empty()) continue;
    for (const auto& u : e.treated) push(u, 1);
    for (const auto& u : e.controls) push(u, 0);
  }
  return group_difference(y, g, w);
}

}  // namespace

std::vector<BalanceRow> balance_table(const MatchedSet& exact_stage, const MatchedSet& refined,
                                      const PanelMap& panels, OutcomeKind kind, int t_from,
                                      int t_to) {
  if (exact_stage.entries.empty() && refined.entries.empty())
    throw InvalidInput("balance table needs a non-empty matched set");
  std::vector<BalanceRow> rows;
  for (int t = t_from; t <= t_to; ++t)
    rows.push_back({t, stage_cell(exact_stage, panels, kind, t), stage_cell(refined, panels, kind, t)});
  return rows;
}

void write_balance_csv(const std::string& path, const std::vector<BalanceRow>& rows) {
  csv::Table table{{"year", "coef_exact", "se_exact", "stars_exact", "coef_refined", "se_refined",
                    "stars_refined", "n_exact", "n_refined", "flags"},
                   {}};
  for (const auto& r : rows) {
    std::string flags;
    if (r.exact.degenerate) flags += "exact_degenerate";
    if (r.refined.degenerate) flags += std::string(flags.empty() ? "" : ";") + "refined_degenerate";
    table.rows.push_back({std::to_string(r.t), csv::num(r.exact.coef, 4), csv::num(r.exact.se, 4),
                          significance_stars(r.exact.p), csv::num(r.refined.coef, 4),
                          csv::num(r.refined.se, 4), significance_stars(r.refined.p),
                          std::to_string(r.exact.n_obs), std::to_string(r.refined.n_obs), flags});
  }
  csv::write_file(path, table);
}

}  // namespace hatmatch
