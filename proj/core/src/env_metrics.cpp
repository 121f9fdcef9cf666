#include "hatmatch/env_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"

namespace hatmatch {

double change_rate(const std::set<std::string>& before, const std::set<std::string>& after) {
  if (after.empty()) throw UndefinedRateError("change rate undefined: empty after-set");
  std::size_t fresh = 0;
  for (const auto& x : after)
    if (!before.count(x)) ++fresh;
  return static_cast<double>(fresh) / static_cast<double>(after.size());
}

namespace {

struct WindowAgg {
  int papers = 0;
  double team_total = 0.0;
  std::set<std::string> collaborators, institutions, topics;
};

WindowAgg aggregate(const AuthorYearPanel& p, Year first, Year last) {
  WindowAgg agg;
  for (Year y = first; y <= last; ++y) {
    if (auto it = p.teamsizes_by_year.find(y); it != p.teamsizes_by_year.end()) {
      for (int s : it->second) {
        ++agg.papers;
        agg.team_total += s;
      }
    }
    if (auto it = p.collaborators_by_year.find(y); it != p.collaborators_by_year.end())
      agg.collaborators.insert(it->second.begin(), it->second.end());
    if (auto it = p.institutions_by_year.find(y); it != p.institutions_by_year.end())
      agg.institutions.insert(it->second.begin(), it->second.end());
    if (auto it = p.topics_by_year.find(y); it != p.topics_by_year.end())
      agg.topics.insert(it->second.begin(), it->second.end());
  }
  return agg;
}

double rate_or_throw(const std::set<std::string>& before, const std::set<std::string>& after,
                     const char* reason) {
  if (after.empty()) throw UndefinedRateError(reason);
  return change_rate(before, after);
}

}  // namespace

EnvironmentDelta environment_delta(const AuthorYearPanel& panel, Year y_w,
                                   const DeltaWindows& windows) {
  EnvironmentDelta d;
  d.author_id = panel.author_id;
  d.pre_first = y_w - windows.pre_years;
  d.pre_last = y_w - 1;
  d.post_first = y_w;
  d.post_last = y_w + windows.post_years - 1;
  const WindowAgg pre = aggregate(panel, d.pre_first, d.pre_last);
  const WindowAgg post = aggregate(panel, d.post_first, d.post_last);
  if (post.papers == 0) throw UndefinedRateError("empty_post_window");
  if (pre.papers == 0) throw UndefinedRateError("empty_pre_window");
  d.d_a = rate_or_throw(pre.collaborators, post.collaborators, "undefined_d_a");
  d.d_i = rate_or_throw(pre.institutions, post.institutions, "undefined_d_i");
  d.d_c = rate_or_throw(pre.topics, post.topics, "undefined_d_c");
  d.d_size = post.team_total / post.papers - pre.team_total / pre.papers;
  return d;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double success_value(const AuthorYearPanel& panel, Year y_w, OutcomeKind metric,
                     const SuccessWindow& window) {
  double total = 0.0;
  for (Year y = y_w + window.first_offset; y <= y_w + window.last_offset; ++y)
    total += metric == OutcomeKind::Publications ? panel.pubs(y)
                                                 : static_cast<double>(panel.cites(y));
  return total;
}

SuccessOutcome success_outcome(const AuthorYearPanel& panel, Year y_w, OutcomeKind metric,
                               double reference_median, Year horizon_end,
                               const SuccessWindow& window) {
  SuccessOutcome out;
  out.author_id = panel.author_id;
  out.metric = metric;
  out.value = success_value(panel, y_w, metric, window);
  out.median = reference_median;
  out.label = out.value > reference_median ? 1 : 0;
  out.truncated = y_w + window.last_offset > horizon_end;
  return out;
}

void write_deltas_csv(const std::string& path, const std::vector<DeltaRow>& rows) {
  csv::Table t{{"author_id", "group", "y_w", "d_a", "d_i", "d_c", "d_size", "flags"}, {}};
  for (const auto& r : rows) {
    if (r.flags.empty()) {
      t.rows.push_back({r.author_id, r.group, std::to_string(r.align_year),
                        csv::num(r.delta.d_a), csv::num(r.delta.d_i), csv::num(r.delta.d_c),
                        csv::num(r.delta.d_size), ""});
    } else {
      t.rows.push_back({r.author_id, r.group, std::to_string(r.align_year), "", "", "", "",
                        r.flags});
    }
  }
  csv::write_file(path, t);
}

void write_outcomes_csv(const std::string& path, const std::vector<SuccessOutcome>& rows) {
  csv::Table t{{"author_id", "metric", "value", "median", "label", "flags"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({r.author_id, to_string(r.metric), csv::num(r.value, 1),
                      csv::num(r.median, 2), std::to_string(r.label),
                      r.truncated ? "truncated_window" : ""});
  csv::write_file(path, t);
}

}  // namespace hatmatch
