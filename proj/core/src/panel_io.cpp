#include <fstream>
#include <iostream>

#include "hatmatch/corpus.hpp"
#include "hatmatch/error.hpp"
#include "json.hpp"

namespace hatmatch {

using nlohmann::json;

namespace {

template <typename V>
json year_map(const std::map<Year, V>& m) {
  json out = json::object();
  for (const auto& [y, v] : m) out[std::to_string(y)] = v;
  return out;
}

template <typename V>
std::map<Year, V> read_year_map(const json& j) {
  std::map<Year, V> out;
  for (const auto& [k, v] : j.items()) out[std::stoi(k)] = v.template get<V>();
  return out;
}

}  // namespace

std::string panel_to_json_line(const AuthorYearPanel& p) {
  json j;
  j["author_id"] = p.author_id;
  j["y0"] = p.y0;
  j["discipline"] = p.discipline;
  j["pubs_by_year"] = year_map(p.pubs_by_year);
  j["cites_by_year"] = year_map(p.cites_by_year);
  j["collaborators_by_year"] = year_map(p.collaborators_by_year);
  j["institutions_by_year"] = year_map(p.institutions_by_year);
  j["topics_by_year"] = year_map(p.topics_by_year);
  j["teamsizes_by_year"] = year_map(p.teamsizes_by_year);
  j["country_by_year"] = year_map(p.country_by_year);
  j["total_pubs"] = p.total_pubs;
  j["total_cites"] = p.total_cites;
  return j.dump();
}

AuthorYearPanel panel_from_json_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidInput("malformed panel line");
  try {
    AuthorYearPanel p;
    p.author_id = j.at("author_id").get<std::string>();
    p.y0 = j.at("y0").get<int>();
    p.discipline = j.at("discipline").get<std::string>();
    p.pubs_by_year = read_year_map<int>(j.at("pubs_by_year"));
    p.cites_by_year = read_year_map<std::int64_t>(j.at("cites_by_year"));
    p.collaborators_by_year = read_year_map<std::set<AuthorId>>(j.at("collaborators_by_year"));
    p.institutions_by_year = read_year_map<std::set<std::string>>(j.at("institutions_by_year"));
    p.topics_by_year = read_year_map<std::set<std::string>>(j.at("topics_by_year"));
    p.teamsizes_by_year = read_year_map<std::vector<int>>(j.at("teamsizes_by_year"));
    p.country_by_year = read_year_map<std::set<std::string>>(j.at("country_by_year"));
    p.total_pubs = j.at("total_pubs").get<std::int64_t>();
    p.total_cites = j.at("total_cites").get<std::int64_t>();
    return p;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("panel line missing field: ") + e.what());
  }
}

void write_panels(std::ostream& out, const PanelMap& panels) {
  for (const auto& [id, p] : panels) out << panel_to_json_line(p) << '\n';
}

void write_panels_file(const std::string& path, const PanelMap& panels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write panels file: " + path);
  write_panels(out, panels);
}

PanelMap read_panels(std::istream& in) {
  PanelMap panels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto p = panel_from_json_line(line);
    panels.emplace(p.author_id, std::move(p));
  }
  return panels;
}

PanelMap read_panels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open panels file: " + path);
  return read_panels(in);
}

void write_flat_works(std::ostream& out, const std::vector<PublicationRecord>& records) {
  for (const auto& r : records) {
    json j;
    j["id"] = r.paper_id;
    j["year"] = r.year;
    json authors = json::array();
    for (const auto& a : r.authorships)
      authors.push_back({{"id", a.author_id}, {"institutions", a.institution_ids}});
    j["authors"] = std::move(authors);
    j["countries"] = r.institution_countries;
    json topics = json::array();
    for (const auto& t : r.topics) topics.push_back({{"id", t.topic_id}, {"level", t.level}});
    j["topics"] = std::move(topics);
    j["references"] = r.references;
    out << j.dump() << '\n';
  }
}

}  // namespace hatmatch
