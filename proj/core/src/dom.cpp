#include "hatmatch/dom.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hatmatch/assignment.hpp"
#include "hatmatch/error.hpp"

namespace hatmatch {

double dom_distance(const PreSeries& a, const PreSeries& b, double divisor) {
  if (a.pubs.size() != b.pubs.size() || a.cites.size() != b.cites.size())
    throw InvalidInput("dom_distance: series lengths differ");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.pubs.size(); ++t) {
    const double dp = std::log1p(a.pubs[t]) - std::log1p(b.pubs[t]);
    const double dc = std::log1p(a.cites[t]) - std::log1p(b.cites[t]);
    sum += dp * dp + dc * dc;
  }
  return sum / divisor;
}

DOMSolution dom_match(std::span<const DomTreated> treated, int k, double divisor) {
  std::map<AuthorId, int> control_index;
  std::vector<std::vector<std::pair<double, const DomCandidate*>>> shortlist(treated.size());
  for (std::size_t i = 0; i < treated.size(); ++i) {
    auto& list = shortlist[i];
    for (const auto& c : treated[i].pool)
      list.emplace_back(dom_distance(treated[i].series, c.series, divisor), &c);
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second->id < b.second->id;
    });
    if (static_cast<int>(list.size()) > k) list.resize(static_cast<std::size_t>(k));
    for (const auto& [d, c] : list) control_index.emplace(c->id, 0);
  }
  std::vector<AuthorId> controls;
  for (auto& [id, idx] : control_index) {
    idx = static_cast<int>(controls.size());
    controls.push_back(id);
  }

  std::vector<AssignmentEdge> edges;
  std::vector<std::map<int, const DomCandidate*>> candidate_at(treated.size());
  for (std::size_t i = 0; i < treated.size(); ++i) {
    for (const auto& [d, c] : shortlist[i]) {
      const int col = control_index.at(c->id);
      // A control listed twice (two alignment years) keeps its closer entry.
      if (candidate_at[i].count(col)) continue;
      candidate_at[i][col] = c;
      edges.push_back({static_cast<int>(i), col, d});
    }
  }
  const auto assignment = min_cost_assignment(static_cast<int>(treated.size()),
                                              static_cast<int>(controls.size()), edges);
  DOMSolution sol;
  for (std::size_t i = 0; i < treated.size(); ++i) {
    const int col = assignment.row_to_col[i];
    if (col < 0) {
      sol.unmatched_treated.push_back(treated[i].id);
      continue;
    }
    const DomCandidate* c = candidate_at[i].at(col);
    const double d = dom_distance(treated[i].series, c->series, divisor);
    sol.pairs.push_back({treated[i].id, c->id, treated[i].y_w, c->align_year, d});
    sol.total_distance += d;
  }
  return sol;
}

MatchedSet refine_dom(std::span<const CandidatePool> pools, const PanelMap& panels,
                      OutcomeKind kind, int k) {
  MatchedSet set;
  set.method = MatchMethod::DOM;
  set.outcome_kind = kind;
  if (!pools.empty()) set.pool_kind = pools.front().kind;
  auto series_of = [&](const AuthorId& id, Year align) {
    auto it = panels.find(id);
    if (it == panels.end()) throw InvalidInput("unit missing from panels: " + id);
    return pre_series(it->second, align);
  };
  std::vector<DomTreated> treated;
  for (const auto& pool : pools) {
    if (pool.contenders.empty()) {
      ++set.failures["empty_pool"];
      continue;
    }
    DomTreated t{pool.treated_id, pool.treated_y_w, series_of(pool.treated_id, pool.treated_y_w), {}};
    for (const auto& c : pool.contenders)
      t.pool.push_back({c.id, c.align_year, series_of(c.id, c.align_year)});
    treated.push_back(std::move(t));
  }
  const DOMSolution sol = dom_match(treated, k);
  if (!sol.unmatched_treated.empty())
    set.failures["assignment_unmatched"] += static_cast<int>(sol.unmatched_treated.size());
  for (const auto& p : sol.pairs) {
    MatchedEntry e;
    e.key = p.treated_id;
    e.treated.push_back({p.treated_id, p.treated_y_w, 1.0});
    e.controls.push_back({p.control_id, p.control_align_year, 1.0});
    e.distance = p.distance;
    set.entries.push_back(std::move(e));
  }
  return set;
}

}  // namespace hatmatch
