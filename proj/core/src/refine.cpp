#include <cmath>
#include <numeric>

#include "hatmatch/error.hpp"
#include "hatmatch/matching.hpp"

namespace hatmatch {

double sample_sd(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

ScmRefinement refine_scm(std::span<const CandidatePool> pools, const PanelMap& panels,
                         OutcomeKind kind, const RefineOptions& options) {
  ScmRefinement out;
  out.matched.method = MatchMethod::SCM;
  out.matched.outcome_kind = kind;
  if (!pools.empty()) out.matched.pool_kind = pools.front().kind;
  auto& failures = out.matched.failures;

  for (const auto& pool : pools) {
    if (pool.contenders.empty()) {
      ++failures["empty_pool"];
      continue;
    }
    auto treated_it = panels.find(pool.treated_id);
    if (treated_it == panels.end())
      throw InvalidInput("treated unit missing from panels: " + pool.treated_id);
    const PreSeries treated_pre = pre_series(treated_it->second, pool.treated_y_w);

    ScmProblem problem;
    problem.treated_predictors = scm_predictors(treated_pre, kind);
    problem.treated_outcomes =
        kind == OutcomeKind::Publications ? treated_pre.pubs : treated_pre.cites;
    std::vector<AuthorId> donor_ids;
    for (const auto& c : pool.contenders) {
      auto it = panels.find(c.id);
      if (it == panels.end()) throw InvalidInput("contender missing from panels: " + c.id);
      const PreSeries s = pre_series(it->second, c.align_year);
      problem.donor_predictors.push_back(scm_predictors(s, kind));
      problem.donor_outcomes.push_back(kind == OutcomeKind::Publications ? s.pubs : s.cites);
      donor_ids.push_back(c.id);
    }

    SCMWeights fit = scm_fit(problem, options.scm);
    fit.treated_id = pool.treated_id;
    fit.donor_ids = donor_ids;
    fit.outcome_kind = kind;

    const double gate = options.gate_factor * sample_sd(problem.treated_outcomes);
    const bool gated = fit.pre_rmspe > gate + 1e-9;
    if (!fit.converged) ++failures["nonconverged"];
    if (gated) {
      ++failures["quality_gate"];
      out.fits.push_back(std::move(fit));
      continue;
    }

    MatchedEntry e;
    e.key = pool.treated_id;
    e.treated.push_back({pool.treated_id, pool.treated_y_w, 1.0});
    for (std::size_t j = 0; j < pool.contenders.size(); ++j)
      if (fit.weights[j] >= options.min_weight)
        e.controls.push_back({pool.contenders[j].id, pool.contenders[j].align_year, fit.weights[j]});
    e.pre_rmspe = fit.pre_rmspe;
    e.converged = fit.converged;
    if (!fit.converged) e.flags.push_back("nonconverged");
    out.matched.entries.push_back(std::move(e));
    out.fits.push_back(std::move(fit));
  }
  return out;
}

}  // namespace hatmatch
