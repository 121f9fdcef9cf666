#include "hatmatch/cem.hpp"

#include <algorithm>
#include <set>

#include "hatmatch/error.hpp"

namespace hatmatch {

CemSignature cem_signature(std::span<const double> covariates, const Coarsening& coarsening) {
  CemSignature sig;
  sig.reserve(covariates.size());
  for (double x : covariates) {
    if (coarsening.cutpoints.empty()) {
      sig.push_back(log2_bin(x));
    } else {
      sig.push_back(static_cast<int>(std::upper_bound(coarsening.cutpoints.begin(),
                                                      coarsening.cutpoints.end(), x) -
                                     coarsening.cutpoints.begin()));
    }
  }
  return sig;
}

CEMSolution cem_match(std::span<const CemUnit> units, const Coarsening& coarsening) {
  std::map<CemSignature, CemStratum> all;
  for (std::size_t i = 0; i < units.size(); ++i) {
    auto& s = all[cem_signature(units[i].covariates, coarsening)];
    (units[i].treated ? s.treated : s.controls).push_back(i);
  }
  CEMSolution sol;
  sol.retained.assign(units.size(), 0);
  sol.weights.assign(units.size(), 0.0);
  for (auto& [sig, s] : all) {
    if (s.treated.empty() || s.controls.empty()) {
      ++sol.pruned_strata;
      continue;
    }
    sol.matched_treated += static_cast<int>(s.treated.size());
    sol.matched_controls += static_cast<int>(s.controls.size());
    sol.strata.emplace(sig, std::move(s));
  }
  if (sol.strata.empty()) return sol;
  const double ratio = static_cast<double>(sol.matched_controls) / sol.matched_treated;
  for (const auto& [sig, s] : sol.strata) {
    const double w = ratio * static_cast<double>(s.treated.size()) /
                     static_cast<double>(s.controls.size());
    for (auto i : s.treated) {
      sol.retained[i] = 1;
      sol.weights[i] = 1.0;
    }
    for (auto i : s.controls) {
      sol.retained[i] = 1;
      sol.weights[i] = w;
    }
  }
  return sol;
}

std::vector<double> cem_covariates(const PreSeries& series) {
  std::vector<double> x(series.pubs.begin(), series.pubs.end());
  x.insert(x.end(), series.cites.begin(), series.cites.end());
  return x;
}

std::string signature_key(const CemSignature& sig) {
  std::string key;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) key += '-';
    key += std::to_string(sig[i]);
  }
  return key;
}

MatchedSet refine_cem(std::span<const CandidatePool> pools, const PanelMap& panels,
                      OutcomeKind kind, const Coarsening& coarsening) {
  MatchedSet set;
  set.method = MatchMethod::CEM;
  set.outcome_kind = kind;
  if (!pools.empty()) set.pool_kind = pools.front().kind;

  std::vector<CemUnit> units;
  std::set<std::pair<AuthorId, Year>> seen_controls;
  auto add_unit = [&](const AuthorId& id, Year align, bool treated) {
    auto it = panels.find(id);
    if (it == panels.end()) throw InvalidInput("unit missing from panels: " + id);
    units.push_back({id, align, treated, cem_covariates(pre_series(it->second, align))});
  };
  for (const auto& pool : pools) {
    if (pool.contenders.empty()) {
      ++set.failures["empty_pool"];
      continue;
    }
    add_unit(pool.treated_id, pool.treated_y_w, true);
    for (const auto& c : pool.contenders)
      if (seen_controls.emplace(c.id, c.align_year).second) add_unit(c.id, c.align_year, false);
  }

  const CEMSolution sol = cem_match(units, coarsening);
  int treated_total = 0;
  for (const auto& u : units) treated_total += u.treated;
  if (treated_total > sol.matched_treated)
    set.failures["cem_pruned"] += treated_total - sol.matched_treated;

  for (const auto& [sig, s] : sol.strata) {
    MatchedEntry e;
    e.key = "stratum:" + signature_key(sig);
    for (auto i : s.treated) e.treated.push_back({units[i].id, units[i].align_year, sol.weights[i]});
    for (auto i : s.controls)
      e.controls.push_back({units[i].id, units[i].align_year, sol.weights[i]});
    set.entries.push_back(std::move(e));
  }
  return set;
}

}  // namespace hatmatch
