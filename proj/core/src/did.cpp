#include "hatmatch/did.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/stats.hpp"

namespace hatmatch {

DidPanel build_did_panel(const MatchedSet& matched, const PanelMap& panels, Year corpus_first,
                         Year corpus_last, const DidWindow& window) {
  DidPanel out;
  const OutcomeKind kind = matched.outcome_kind;
  for (const auto& entry : matched.entries) {
    if (entry.controls.empty() || entry.treated.empty()) continue;
    out.n_pairs += static_cast<int>(entry.treated.size());
    const auto& lead = entry.treated.front();
    auto lead_it = panels.find(lead.id);
    if (lead_it == panels.end()) throw InvalidInput("matched unit missing from panels: " + lead.id);
    const std::string discipline = lead_it->second.discipline;

    auto add_unit = [&](const MatchedUnit& u, bool treated) {
      auto it = panels.find(u.id);
      if (it == panels.end()) throw InvalidInput("matched unit missing from panels: " + u.id);
      const std::string sid = entry.key + "|" + u.id + "@" + std::to_string(u.align_year);
      bool truncated = false;
      int post_years = 0;
      for (int t = window.first; t <= window.last; ++t) {
        const Year y = u.align_year + t;
        if (y < corpus_first || y > corpus_last) {
          truncated = true;
          continue;
        }
        const double raw = kind == OutcomeKind::Publications
                               ? it->second.pubs(y)
                               : static_cast<double>(it->second.cites(y));
        PanelObservation o;
        o.scientist_id = sid;
        o.cluster_id = u.id;
        o.t = t;
        o.y = outcome_value(kind, raw);
        o.treat = treated;
        o.post = t >= 1;
        o.weight = u.weight;
        o.discipline = discipline;
        o.cohort_year = lead.align_year;
        out.rows.push_back(std::move(o));
        if (t >= 1) ++post_years;
      }
      if (truncated) ++out.truncated_units;
      if (treated && post_years < 2) ++out.short_post_units;
    };
    for (const auto& u : entry.treated) add_unit(u, true);
    for (const auto& u : entry.controls) add_unit(u, false);
  }
  return out;
}

namespace {

FeDesign base_design(std::span<const PanelObservation> obs) {
  std::map<std::string, int> units, clusters;
  std::map<int, int> periods;
  for (const auto& o : obs) {
    units.emplace(o.scientist_id, 0);
    clusters.emplace(o.cluster_id, 0);
    periods.emplace(o.t, 0);
  }
  int i = 0;
  for (auto& [k, v] : units) v = i++;
  i = 0;
  for (auto& [k, v] : clusters) v = i++;
  i = 0;
  for (auto& [k, v] : periods) v = i++;
  FeDesign d;
  for (const auto& o : obs) {
    d.y.push_back(o.y);
    d.weights.push_back(o.weight);
    d.unit.push_back(units.at(o.scientist_id));
    d.period.push_back(periods.at(o.t));
    d.cluster.push_back(clusters.at(o.cluster_id));
  }
  return d;
}

}  // namespace

DIDEstimate twfe_did(std::span<const PanelObservation> obs, const DidOptions& options) {
  FeDesign d = base_design(obs);
  std::vector<double> interaction;
  interaction.reserve(obs.size());
  for (const auto& o : obs) interaction.push_back(o.treat && o.t >= 1 ? 1.0 : 0.0);
  d.regressors.push_back(std::move(interaction));
  d.regressor_names.push_back("treat_x_post");

  DIDEstimate est;
  est.n_obs = static_cast<int>(obs.size());
  if (d.y.empty()) throw DegenerateFitError("units", "empty DID panel");
  const bool all_same =
      std::all_of(d.y.begin(), d.y.end(), [&](double v) { return v == d.y.front(); });
  if (all_same) {
    // Outcome without variance: beta is exactly zero.
    est.flags.push_back("zero_variance");
    est.beta1 = 0.0;
    est.se = 0.0;
    est.p = 1.0;
    std::set<std::string> clusters;
    for (const auto& o : obs) clusters.insert(o.cluster_id);
    est.n_clusters = static_cast<int>(clusters.size());
    return est;
  }
  const FeResult fit = fit_two_way_fe(d, options.se, options.solver);
  est.beta1 = fit.coef[0];
  est.se = fit.se[0];
  est.r2 = fit.r2;
  est.n_clusters = fit.n_clusters;
  if (est.se > 0.0) {
    est.p = p_value_t(est.beta1 / est.se, fit.dof);
  } else {
    est.flags.push_back("zero_se");
    est.p = est.beta1 == 0.0 ? 1.0 : 0.0;
  }
  est.ci_lo = est.beta1 - 1.96 * est.se;
  est.ci_hi = est.beta1 + 1.96 * est.se;
  if (fit.zero_variance) est.flags.push_back("zero_variance");
  return est;
}

EventStudyEstimate event_study(std::span<const PanelObservation> obs, int first_horizon,
                               int last_horizon, const DidOptions& options) {
  EventStudyEstimate es;
  es.n_obs = static_cast<int>(obs.size());
  FeDesign d = base_design(obs);
  std::vector<int> present_index;
  for (int h = first_horizon; h <= last_horizon; ++h) {
    HorizonEffect eff;
    eff.horizon = h;
    std::vector<double> col;
    col.reserve(obs.size());
    bool any = false;
    for (const auto& o : obs) {
      const bool on = o.treat && o.t == h;
      col.push_back(on ? 1.0 : 0.0);
      any = any || on;
    }
    if (any) {
      present_index.push_back(static_cast<int>(es.horizons.size()));
      d.regressors.push_back(std::move(col));
      d.regressor_names.push_back("treat_x_post_" + std::to_string(h));
      eff.present = true;
    } else {
      es.flags.push_back("missing_horizon_" + std::to_string(h));
    }
    es.horizons.push_back(eff);
  }
  if (d.regressors.empty()) return es;
  const FeResult fit = fit_two_way_fe(d, options.se, options.solver);
  for (std::size_t j = 0; j < present_index.size(); ++j) {
    auto& eff = es.horizons[static_cast<std::size_t>(present_index[j])];
    eff.beta = fit.coef[j];
    eff.se = fit.se[j];
    eff.p = eff.se > 0.0 ? p_value_t(eff.beta / eff.se, fit.dof) : (eff.beta == 0.0 ? 1.0 : 0.0);
    eff.ci_lo = eff.beta - 1.96 * eff.se;
    eff.ci_hi = eff.beta + 1.96 * eff.se;
  }
  return es;
}

void write_estimates_csv(const std::string& path, const std::vector<EstimateRow>& rows) {
  csv::Table t{{"model", "comparison", "method", "outcome", "subset", "beta", "se", "p", "stars",
                "n_pairs", "n_obs", "r2", "flags"},
               {}};
  for (const auto& r : rows) {
    std::string flags;
    for (const auto& f : r.estimate.flags) flags += (flags.empty() ? "" : ";") + f;
    const auto& e = r.estimate;
    t.rows.push_back({r.model, r.comparison, r.method, r.outcome, r.subset, csv::num(e.beta1, 10),
                      csv::num(e.se, 10), csv::num(e.p, 10), significance_stars(e.p),
                      std::to_string(e.n_pairs), std::to_string(e.n_obs), csv::num(e.r2, 4),
                      flags});
  }
  csv::write_file(path, t);
}

void write_event_csv(const std::string& path, const EventStudyEstimate& es) {
  csv::Table t{{"T", "beta", "se", "ci_lo", "ci_hi", "flags"}, {}};
  for (const auto& h : es.horizons) {
    if (!h.present) {
      t.rows.push_back({std::to_string(h.horizon), "", "", "", "", "missing_horizon"});
      continue;
    }
    t.rows.push_back({std::to_string(h.horizon), csv::num(h.beta, 10), csv::num(h.se, 10),
                      csv::num(h.ci_lo, 10), csv::num(h.ci_hi, 10), ""});
  }
  csv::write_file(path, t);
}

}  // namespace hatmatch
