#include "hatmatch/mobility.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"

namespace hatmatch {

std::optional<MobilityEvent> detect_move(const AuthorYearPanel& panel,
                                         const MobilityOptions& options) {
  int run_years = 0;
  Year run_last = 0;
  std::map<std::string, int> run_countries;
  auto reset = [&] {
    run_years = 0;
    run_countries.clear();
  };

  for (const auto& [year, countries] : panel.country_by_year) {
    if (countries.empty()) continue;  // silent
    if (countries.count(options.destination)) {
      if (run_years >= options.min_run && year - run_last - 1 <= options.max_gap) {
        MobilityEvent ev{panel.author_id, year, {}, options.destination};
        int best = 0;
        for (const auto& [c, n] : run_countries)
          if (n > best) {
            best = n;
            ev.origin_country = c;
          }
        return ev;
      }
      reset();
      continue;
    }
    if (run_years > 0 && year - run_last - 1 > options.max_gap) reset();
    ++run_years;
    run_last = year;
    for (const auto& c : countries) ++run_countries[c];
  }
  return std::nullopt;
}

std::string to_string(Group g) {
  switch (g) {
    case Group::Gw: return "G_w";
    case Group::G1: return "G_1";
    case Group::G2: return "G_2";
    case Group::None: return "none";
  }
  return "none";
}

Group parse_group(const std::string& s) {
  if (s == "G_w") return Group::Gw;
  if (s == "G_1") return Group::G1;
  if (s == "G_2") return Group::G2;
  if (s == "none") return Group::None;
  throw InvalidInput("unknown group label '" + s + "'");
}

const GroupLabel* GroupAssignment::find(const AuthorId& id) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), id,
                             [](const GroupLabel& l, const AuthorId& v) { return l.author_id < v; });
  return it != labels.end() && it->author_id == id ? &*it : nullptr;
}

std::vector<const GroupLabel*> GroupAssignment::members(Group g) const {
  std::vector<const GroupLabel*> out;
  for (const auto& l : labels)
    if (l.group == g) out.push_back(&l);
  return out;
}

namespace {

bool expected_cohort(Year y) { return (y >= 2011 && y <= 2013) || (y >= 2015 && y <= 2018); }

}  // namespace

GroupAssignment assign_groups(const PanelMap& panels, const std::vector<RosterEntry>& roster,
                              const MobilityOptions& options) {
  GroupAssignment out;
  std::map<AuthorId, Year> cohort;
  for (const auto& r : roster) {
    cohort[r.author_id] = r.cohort_year;
    if (!panels.count(r.author_id))
      out.audit_log.push_back("roster_missing: " + r.author_id + " not found in eligible panels");
  }

  for (const auto& [id, panel] : panels) {
    bool any_known = false;
    std::set<std::string> all_countries;
    for (const auto& [y, cs] : panel.country_by_year) {
      if (!cs.empty()) any_known = true;
      all_countries.insert(cs.begin(), cs.end());
    }
    if (!any_known) ++out.all_unknown_country;

    const auto event = any_known ? detect_move(panel, options) : std::nullopt;
    GroupLabel label{id, Group::None, std::nullopt, {}, {}};
    if (auto it = cohort.find(id); it != cohort.end()) {
      const Year claimed = it->second;
      label.audit_flags.push_back("claimed=" + std::to_string(claimed));
      if (!expected_cohort(claimed)) label.audit_flags.push_back("cohort_unexpected");
      if (!event) {
        label.audit_flags.push_back("roster_no_move");
        out.audit_log.push_back("roster_no_move: " + id);
      } else if (std::abs(event->y_w - claimed) > options.max_cohort_gap) {
        label.y_w = event->y_w;
        label.origin = event->origin_country;
        label.audit_flags.push_back("cohort_mismatch");
        out.audit_log.push_back("cohort_mismatch: " + id + " detected " +
                                std::to_string(event->y_w) + " claimed " +
                                std::to_string(claimed));
      } else {
        label.group = Group::Gw;
        label.y_w = event->y_w;
        label.origin = event->origin_country;
      }
      out.labels.push_back(std::move(label));
      continue;
    }
    if (event) {
      label.group = Group::G1;
      label.y_w = event->y_w;
      label.origin = event->origin_country;
    } else if (all_countries.size() == 1) {
      label.group = Group::G2;
      label.origin = *all_countries.begin();
    } else {
      continue;
    }
    out.labels.push_back(std::move(label));
  }
  return out;
}

std::vector<RosterEntry> read_roster_csv(const std::string& path) {
  auto table = csv::read_file(path);
  const int id_col = table.column("author_id");
  const int year_col = table.column("cohort_year");
  if (id_col < 0 || year_col < 0)
    throw InvalidInput("roster CSV needs columns author_id, cohort_year: " + path);
  std::vector<RosterEntry> roster;
  for (const auto& row : table.rows) {
    if (static_cast<int>(row.size()) <= std::max(id_col, year_col)) continue;
    roster.push_back({row[id_col], std::stoi(row[year_col])});
  }
  return roster;
}

void write_roster_csv(const std::string& path, const std::vector<RosterEntry>& roster) {
  csv::Table t{{"author_id", "cohort_year"}, {}};
  for (const auto& r : roster) t.rows.push_back({r.author_id, std::to_string(r.cohort_year)});
  csv::write_file(path, t);
}

void write_labels_csv(const std::string& path, const GroupAssignment& groups) {
  csv::Table t{{"author_id", "group", "y_w", "origin", "audit_flags"}, {}};
  for (const auto& l : groups.labels) {
    std::string flags;
    for (const auto& f : l.audit_flags) flags += (flags.empty() ? "" : ";") + f;
    t.rows.push_back({l.author_id, to_string(l.group), l.y_w ? std::to_string(*l.y_w) : "",
                      l.origin, flags});
  }
  csv::write_file(path, t);
}

GroupAssignment read_labels_csv(const std::string& path) {
  auto table = csv::read_file(path);
  const int c_id = table.column("author_id"), c_group = table.column("group"),
            c_yw = table.column("y_w"), c_origin = table.column("origin"),
            c_flags = table.column("audit_flags");
  if (c_id < 0 || c_group < 0 || c_yw < 0)
    throw InvalidInput("labels CSV needs columns author_id, group, y_w: " + path);
  GroupAssignment out;
  for (const auto& row : table.rows) {
    GroupLabel l;
    l.author_id = row.at(c_id);
    l.group = parse_group(row.at(c_group));
    if (!row.at(c_yw).empty()) l.y_w = std::stoi(row[c_yw]);
    if (c_origin >= 0 && c_origin < static_cast<int>(row.size())) l.origin = row[c_origin];
    if (c_flags >= 0 && c_flags < static_cast<int>(row.size()) && !row[c_flags].empty()) {
      std::stringstream ss(row[c_flags]);
      std::string f;
      while (std::getline(ss, f, ';')) l.audit_flags.push_back(f);
    }
    out.labels.push_back(std::move(l));
  }
  std::sort(out.labels.begin(), out.labels.end(),
            [](const GroupLabel& a, const GroupLabel& b) { return a.author_id < b.author_id; });
  return out;
}

}  // namespace hatmatch
