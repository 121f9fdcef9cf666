#pragma once

// Cross-border movement detection and G_w / G_1 / G_2 labelling.

#include <optional>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"

namespace hatmatch {

struct MobilityEvent {
  AuthorId author_id;
  Year y_w = 0;
  std::string origin_country;
  std::string destination_country;
};

struct MobilityOptions {
  std::string destination = "CN";
  int min_run = 3;         // foreign publishing years before the move
  int max_gap = 1;         // silent years tolerated inside / right after the run
  int max_cohort_gap = 2;  // |detected Y_w - roster cohort| allowed
};

// Earliest move to the destination that follows a run of at least min_run
// foreign-affiliated publishing years. A year listing the destination next to
// other countries counts as a destination year. Years whose institutions all
// lack a country code count as silent.
std::optional<MobilityEvent> detect_move(const AuthorYearPanel& panel,
                                         const MobilityOptions& options = {});

enum class Group { Gw, G1, G2, None };

std::string to_string(Group g);
Group parse_group(const std::string& s);

struct RosterEntry {
  AuthorId author_id;
  Year cohort_year = 0;
};

struct GroupLabel {
  AuthorId author_id;
  Group group = Group::None;
  std::optional<Year> y_w;
  std::string origin;
  std::vector<std::string> audit_flags;
};

struct GroupAssignment {
  std::vector<GroupLabel> labels;  // sorted by author_id
  std::vector<std::string> audit_log;
  int all_unknown_country = 0;

  const GroupLabel* find(const AuthorId& id) const;
  std::vector<const GroupLabel*> members(Group g) const;
};

// Roster members detected as movers become G_w (Y_w = detected year);
// other movers are G_1; single-country non-movers are G_2. Roster members
// that fail detection or the cohort check are kept as Group::None rows with
// audit flags. Everyone else is left out.
GroupAssignment assign_groups(const PanelMap& panels, const std::vector<RosterEntry>& roster,
                              const MobilityOptions& options = {});

std::vector<RosterEntry> read_roster_csv(const std::string& path);
void write_roster_csv(const std::string& path, const std::vector<RosterEntry>& roster);
void write_labels_csv(const std::string& path, const GroupAssignment& groups);
GroupAssignment read_labels_csv(const std::string& path);

}  // namespace hatmatch
