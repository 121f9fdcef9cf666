#pragma once

// Publication records and per-author yearly panels.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hatmatch {

using AuthorId = std::string;
using Year = int;

struct Authorship {
  AuthorId author_id;
  std::vector<std::string> institution_ids;
};

struct TopicTag {
  std::string topic_id;
  int level = 0;
};

struct PublicationRecord {
  std::string paper_id;
  Year year = 0;
  std::vector<Authorship> authorships;
  // institution id -> ISO-3166 alpha-2 code. Missing or empty means unknown.
  std::map<std::string, std::string> institution_countries;
  std::vector<TopicTag> topics;
  std::vector<std::string> references;
  // OpenAlex counts_by_year (year -> cited_by_count); only used when the
  // corpus carries no reference links at all.
  std::map<Year, std::int64_t> counts_by_year;
};

enum class WorksFormat { OpenAlexWorks, Flat };

WorksFormat parse_works_format(const std::string& name);
std::string to_string(WorksFormat format);

struct CorpusStats {
  std::int64_t records_read = 0;
  std::map<std::string, std::int64_t> records_dropped;  // reason -> count
  std::int64_t authors_built = 0;
  std::int64_t authors_eligible = 0;
  std::int64_t unknown_country_institutions = 0;
  std::int64_t duplicate_authorships_collapsed = 0;
  bool citations_from_counts_by_year = false;

  std::int64_t total_dropped() const;
  void merge(const CorpusStats& other);
};

struct IngestOptions {
  Year first_year = 2000;
  Year last_year = 2021;
};

// Reads line-delimited JSON. Invalid lines are counted in stats and skipped;
// an unreadable stream throws IoError.
std::vector<PublicationRecord> parse_works(std::istream& in, WorksFormat format,
                                           CorpusStats& stats,
                                           const IngestOptions& options = {});

// Parses a single JSONL line. Returns the drop reason on failure.
struct ParsedLine {
  std::optional<PublicationRecord> record;
  std::string drop_reason;
};
ParsedLine parse_work_line(const std::string& line, WorksFormat format,
                           const IngestOptions& options = {});

// Parses several files (one task per file) and concatenates the records in
// argument order.
std::vector<PublicationRecord> read_works_files(
    const std::vector<std::string>& paths, WorksFormat format,
    CorpusStats& stats, const IngestOptions& options = {});

struct AuthorYearPanel {
  AuthorId author_id;
  Year y0 = 0;
  std::string discipline;  // modal level-0 topic, "" when none
  std::map<Year, int> pubs_by_year;
  std::map<Year, std::int64_t> cites_by_year;
  std::map<Year, std::set<AuthorId>> collaborators_by_year;
  // Every institution on the author's papers (collaborative range).
  std::map<Year, std::set<std::string>> institutions_by_year;
  // Level >= 2 topics.
  std::map<Year, std::set<std::string>> topics_by_year;
  // Per-paper author counts, sorted ascending within a year.
  std::map<Year, std::vector<int>> teamsizes_by_year;
  // Known countries of the author's own affiliations.
  std::map<Year, std::set<std::string>> country_by_year;
  std::int64_t total_pubs = 0;
  std::int64_t total_cites = 0;

  int pubs(Year y) const;
  std::int64_t cites(Year y) const;
  Year last_year() const;
  bool operator==(const AuthorYearPanel&) const = default;
};

using PanelMap = std::map<AuthorId, AuthorYearPanel>;

struct PanelOptions {
  bool include_self_citations = true;
};

PanelMap build_panels(const std::vector<PublicationRecord>& records,
                      CorpusStats& stats, const PanelOptions& options = {});

struct EligibilityPolicy {
  int min_pubs = 10;
  Year start_min = 2000;
  Year roster_start_max = 2015;
  Year other_start_max = 2021;  // corpus end
};

// Keeps panels with total_pubs >= min_pubs and y0 in the applicable range
// (roster members use [start_min, roster_start_max]). Prints a warning to
// std::clog when nothing survives.
PanelMap filter_eligible(const PanelMap& panels, const EligibilityPolicy& policy,
                         const std::set<AuthorId>& roster_ids = {},
                         CorpusStats* stats = nullptr);

// Canonical JSONL (one author per line, sorted keys, sorted by author id).
void write_panels(std::ostream& out, const PanelMap& panels);
void write_panels_file(const std::string& path, const PanelMap& panels);
PanelMap read_panels(std::istream& in);
PanelMap read_panels_file(const std::string& path);

std::string panel_to_json_line(const AuthorYearPanel& panel);
AuthorYearPanel panel_from_json_line(const std::string& line);

// Writes records back as "flat" JSONL.
void write_flat_works(std::ostream& out, const std::vector<PublicationRecord>& records);

}  // namespace hatmatch
