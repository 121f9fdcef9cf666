#include "hatmatch/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <unordered_map>
#include <unordered_set>

#include "hatmatch/error.hpp"
#include "json.hpp"

namespace hatmatch {

using nlohmann::json;

WorksFormat parse_works_format(const std::string& name) {
  if (name == "openalex-works" || name == "openalex") return WorksFormat::OpenAlexWorks;
  if (name == "flat") return WorksFormat::Flat;
  throw InvalidInput("unknown works format '" + name + "' (expected openalex-works or flat)");
}

std::string to_string(WorksFormat format) {
  return format == WorksFormat::OpenAlexWorks ? "openalex-works" : "flat";
}

std::int64_t CorpusStats::total_dropped() const {
  std::int64_t n = 0;
  for (const auto& [reason, count] : records_dropped) n += count;
  return n;
}

void CorpusStats::merge(const CorpusStats& other) {
  records_read += other.records_read;
  for (const auto& [reason, count] : other.records_dropped) records_dropped[reason] += count;
  authors_built += other.authors_built;
  authors_eligible += other.authors_eligible;
  unknown_country_institutions += other.unknown_country_institutions;
  duplicate_authorships_collapsed += other.duplicate_authorships_collapsed;
  citations_from_counts_by_year = citations_from_counts_by_year || other.citations_from_counts_by_year;
}

namespace {

std::optional<std::string> string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<int> int_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) return std::nullopt;
  return static_cast<int>(it->get<double>());
}

const json* array_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) return nullptr;
  return &*it;
}

// Collapses repeated author ids (keeping the union of their institutions).
std::vector<Authorship> dedupe_authorships(std::vector<Authorship> in) {
  std::vector<Authorship> out;
  for (auto& a : in) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Authorship& o) { return o.author_id == a.author_id; });
    if (it == out.end()) {
      out.push_back(std::move(a));
      continue;
    }
    for (auto& inst : a.institution_ids) {
      if (std::find(it->institution_ids.begin(), it->institution_ids.end(), inst) ==
          it->institution_ids.end())
        it->institution_ids.push_back(std::move(inst));
    }
  }
  return out;
}

ParsedLine parse_openalex(const json& doc, PublicationRecord rec) {
  ParsedLine result;
  auto id = string_field(doc, "id");
  if (!id || id->empty()) {
    result.drop_reason = "no_id";
    return result;
  }
  rec.paper_id = *id;
  auto year = int_field(doc, "publication_year");
  if (!year) {
    result.drop_reason = "no_year";
    return result;
  }
  rec.year = *year;

  if (const json* auths = array_field(doc, "authorships")) {
    for (const auto& a : *auths) {
      if (!a.is_object()) continue;
      auto author = a.find("author");
      if (author == a.end() || !author->is_object()) continue;
      auto author_id = string_field(*author, "id");
      if (!author_id || author_id->empty()) continue;
      Authorship entry{*author_id, {}};
      if (const json* insts = array_field(a, "institutions")) {
        for (const auto& inst : *insts) {
          if (!inst.is_object()) continue;
          auto inst_id = string_field(inst, "id");
          if (!inst_id || inst_id->empty()) continue;
          entry.institution_ids.push_back(*inst_id);
          auto cc = string_field(inst, "country_code");
          auto& slot = rec.institution_countries[*inst_id];
          if (cc && !cc->empty()) slot = *cc;
        }
      }
      rec.authorships.push_back(std::move(entry));
    }
  }
  if (const json* concepts = array_field(doc, "concepts")) {
    for (const auto& c : *concepts) {
      if (!c.is_object()) continue;
      auto cid = string_field(c, "id");
      auto level = int_field(c, "level");
      if (cid && level && *level >= 0) rec.topics.push_back({*cid, *level});
    }
  }
  if (const json* refs = array_field(doc, "referenced_works")) {
    for (const auto& r : *refs)
      if (r.is_string()) rec.references.push_back(r.get<std::string>());
  }
  if (const json* counts = array_field(doc, "counts_by_year")) {
    for (const auto& c : *counts) {
      if (!c.is_object()) continue;
      auto y = int_field(c, "year");
      auto n = int_field(c, "cited_by_count");
      if (y && n && *n > 0) rec.counts_by_year[*y] += *n;
    }
  }
  result.record = std::move(rec);
  return result;
}

ParsedLine parse_flat(const json& doc, PublicationRecord rec) {
  ParsedLine result;
  auto id = string_field(doc, "id");
  if (!id || id->empty()) {
    result.drop_reason = "no_id";
    return result;
  }
  rec.paper_id = *id;
  auto year = int_field(doc, "year");
  if (!year) {
    result.drop_reason = "no_year";
    return result;
  }
  rec.year = *year;
  if (const json* auths = array_field(doc, "authors")) {
    for (const auto& a : *auths) {
      if (!a.is_object()) continue;
      auto aid = string_field(a, "id");
      if (!aid || aid->empty()) continue;
      Authorship entry{*aid, {}};
      if (const json* insts = array_field(a, "institutions"))
        for (const auto& inst : *insts)
          if (inst.is_string()) entry.institution_ids.push_back(inst.get<std::string>());
      rec.authorships.push_back(std::move(entry));
    }
  }
  if (auto it = doc.find("countries"); it != doc.end() && it->is_object()) {
    for (const auto& [inst, cc] : it->items())
      rec.institution_countries[inst] = cc.is_string() ? cc.get<std::string>() : std::string{};
  }
  for (const auto& a : rec.authorships)
    for (const auto& inst : a.institution_ids) rec.institution_countries.try_emplace(inst);
  if (const json* topics = array_field(doc, "topics")) {
    for (const auto& t : *topics) {
      if (!t.is_object()) continue;
      auto tid = string_field(t, "id");
      auto level = int_field(t, "level");
      if (tid && level && *level >= 0) rec.topics.push_back({*tid, *level});
    }
  }
  if (const json* refs = array_field(doc, "references")) {
    for (const auto& r : *refs)
      if (r.is_string()) rec.references.push_back(r.get<std::string>());
  }
  if (auto it = doc.find("counts_by_year"); it != doc.end() && it->is_object()) {
    for (const auto& [y, n] : it->items())
      if (n.is_number() && n.get<double>() > 0)
        rec.counts_by_year[std::stoi(y)] += static_cast<std::int64_t>(n.get<double>());
  }
  result.record = std::move(rec);
  return result;
}

}  // namespace

ParsedLine parse_work_line(const std::string& line, WorksFormat format,
                           const IngestOptions& options) {
  ParsedLine result;
  json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    result.drop_reason = "malformed_json";
    return result;
  }
  result = format == WorksFormat::OpenAlexWorks ? parse_openalex(doc, {}) : parse_flat(doc, {});
  if (!result.record) return result;

  auto& rec = *result.record;
  if (rec.year < options.first_year || rec.year > options.last_year) {
    result.record.reset();
    result.drop_reason = "year_out_of_range";
    return result;
  }
  rec.authorships = dedupe_authorships(std::move(rec.authorships));
  if (rec.authorships.empty()) {
    result.record.reset();
    result.drop_reason = "no_authorships";
  }
  return result;
}

std::vector<PublicationRecord> parse_works(std::istream& in, WorksFormat format,
                                           CorpusStats& stats, const IngestOptions& options) {
  if (!in) throw IoError("works stream is not readable");
  std::vector<PublicationRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++stats.records_read;
    auto parsed = parse_work_line(line, format, options);
    if (!parsed.record) {
      ++stats.records_dropped[parsed.drop_reason];
      continue;
    }
    records.push_back(std::move(*parsed.record));
  }
  if (in.bad()) throw IoError("I/O error while reading works stream");
  return records;
}

std::vector<PublicationRecord> read_works_files(const std::vector<std::string>& paths,
                                                WorksFormat format, CorpusStats& stats,
                                                const IngestOptions& options) {
  struct Shard {
    std::vector<PublicationRecord> records;
    CorpusStats stats;
  };
  std::vector<std::future<Shard>> tasks;
  tasks.reserve(paths.size());
  for (const auto& path : paths) {
    tasks.push_back(std::async(std::launch::async, [path, format, options] {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open works file: " + path);
      Shard shard;
      shard.records = parse_works(in, format, shard.stats, options);
      return shard;
    }));
  }
  std::vector<PublicationRecord> all;
  for (auto& task : tasks) {
    Shard shard = task.get();
    stats.merge(shard.stats);
    std::move(shard.records.begin(), shard.records.end(), std::back_inserter(all));
  }
  return all;
}

int AuthorYearPanel::pubs(Year y) const {
  auto it = pubs_by_year.find(y);
  return it == pubs_by_year.end() ? 0 : it->second;
}

std::int64_t AuthorYearPanel::cites(Year y) const {
  auto it = cites_by_year.find(y);
  return it == cites_by_year.end() ? 0 : it->second;
}

Year AuthorYearPanel::last_year() const {
  return pubs_by_year.empty() ? 0 : pubs_by_year.rbegin()->first;
}

PanelMap build_panels(const std::vector<PublicationRecord>& records, CorpusStats& stats,
                      const PanelOptions& options) {
  // Canonical processing order makes the result independent of input order.
  std::vector<const PublicationRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->paper_id < b->paper_id;
  });

  std::unordered_map<std::string, const PublicationRecord*> by_id;
  std::vector<const PublicationRecord*> unique;
  for (const auto* r : order) {
    if (by_id.emplace(r->paper_id, r).second) {
      unique.push_back(r);
    } else {
      ++stats.records_dropped["duplicate_paper_id"];
    }
  }

  PanelMap panels;
  std::map<AuthorId, std::map<std::string, int>> discipline_votes;

  for (const auto* rec : unique) {
    const int team = static_cast<int>(rec->authorships.size());
    std::set<std::string> paper_insts;
    for (const auto& a : rec->authorships)
      paper_insts.insert(a.institution_ids.begin(), a.institution_ids.end());
    for (const auto& inst : paper_insts) {
      auto it = rec->institution_countries.find(inst);
      if (it == rec->institution_countries.end() || it->second.empty())
        ++stats.unknown_country_institutions;
    }
    std::set<std::string> level0, deep_topics;
    for (const auto& t : rec->topics) {
      if (t.level == 0) level0.insert(t.topic_id);
      if (t.level >= 2) deep_topics.insert(t.topic_id);
    }

    for (const auto& a : rec->authorships) {
      auto& p = panels[a.author_id];
      p.author_id = a.author_id;
      const Year y = rec->year;
      ++p.pubs_by_year[y];
      auto& collab = p.collaborators_by_year[y];
      for (const auto& other : rec->authorships)
        if (other.author_id != a.author_id) collab.insert(other.author_id);
      p.institutions_by_year[y].insert(paper_insts.begin(), paper_insts.end());
      p.topics_by_year[y].insert(deep_topics.begin(), deep_topics.end());
      p.teamsizes_by_year[y].push_back(team);
      auto& countries = p.country_by_year[y];
      for (const auto& inst : a.institution_ids) {
        auto it = rec->institution_countries.find(inst);
        if (it != rec->institution_countries.end() && !it->second.empty())
          countries.insert(it->second);
      }
      auto& votes = discipline_votes[a.author_id];
      for (const auto& d : level0) ++votes[d];
    }
  }

  bool any_references = false;
  for (const auto* rec : unique)
    if (!rec->references.empty()) any_references = true;

  if (any_references) {
    for (const auto* citing : unique) {
      std::set<std::string> refs(citing->references.begin(), citing->references.end());
      std::unordered_set<std::string> citing_authors;
      if (!options.include_self_citations)
        for (const auto& a : citing->authorships) citing_authors.insert(a.author_id);
      for (const auto& ref : refs) {
        if (ref == citing->paper_id) continue;
        auto hit = by_id.find(ref);
        if (hit == by_id.end()) continue;  // dangling
        for (const auto& a : hit->second->authorships) {
          if (citing_authors.count(a.author_id)) continue;
          ++panels[a.author_id].cites_by_year[citing->year];
        }
      }
    }
  } else {
    for (const auto* rec : unique) {
      if (rec->counts_by_year.empty()) continue;
      stats.citations_from_counts_by_year = true;
      for (const auto& a : rec->authorships)
        for (const auto& [y, n] : rec->counts_by_year) panels[a.author_id].cites_by_year[y] += n;
    }
  }

  for (auto& [id, p] : panels) {
    p.y0 = p.pubs_by_year.begin()->first;
    p.total_pubs = 0;
    for (const auto& [y, n] : p.pubs_by_year) p.total_pubs += n;
    p.total_cites = 0;
    for (const auto& [y, n] : p.cites_by_year) p.total_cites += n;
    for (auto& [y, sizes] : p.teamsizes_by_year) std::sort(sizes.begin(), sizes.end());
    const auto& votes = discipline_votes[id];
    int best = 0;
    for (const auto& [topic, n] : votes) {  // map order gives lexicographic tie-break
      if (n > best) {
        best = n;
        p.discipline = topic;
      }
    }
  }
  stats.authors_built = static_cast<std::int64_t>(panels.size());
  return panels;
}

PanelMap filter_eligible(const PanelMap& panels, const EligibilityPolicy& policy,
                         const std::set<AuthorId>& roster_ids, CorpusStats* stats) {
  if (policy.start_min > policy.roster_start_max || policy.start_min > policy.other_start_max)
    throw InvalidInput("eligibility policy start range is not well ordered");
  PanelMap kept;
  for (const auto& [id, p] : panels) {
    if (p.total_pubs < policy.min_pubs) continue;
    const Year hi = roster_ids.count(id) ? policy.roster_start_max : policy.other_start_max;
    if (p.y0 < policy.start_min || p.y0 > hi) continue;
    kept.emplace(id, p);
  }
  if (stats) stats->authors_eligible = static_cast<std::int64_t>(kept.size());
  if (kept.empty() && !panels.empty())
    std::clog << "warning: no author passed the eligibility filter (min_pubs="
              << policy.min_pubs << ")\n";
  return kept;
}

}  // namespace hatmatch
