#include <cmath>
#include <fstream>

#include "hatmatch/error.hpp"
#include "hatmatch/matching.hpp"
#include "json.hpp"

namespace hatmatch {

using nlohmann::json;

namespace {

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json units_json(const std::vector<MatchedUnit>& units) {
  json out = json::array();
  for (const auto& u : units) out.push_back({{"id", u.id}, {"align_year", u.align_year}, {"weight", u.weight}});
  return out;
}

std::vector<MatchedUnit> units_from(const json& j) {
  std::vector<MatchedUnit> out;
  for (const auto& u : j)
    out.push_back({u.at("id").get<std::string>(), u.at("align_year").get<int>(), u.at("weight").get<double>()});
  return out;
}

}  // namespace

void write_matches_jsonl(const std::string& path, const MatchedSet& set,
                         std::span<const CandidatePool> pools) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matches file: " + path);
  json header{{"type", "header"},
              {"method", to_string(set.method)},
              {"outcome", to_string(set.outcome_kind)},
              {"pool", to_string(set.pool_kind)},
              {"failures", set.failures},
              {"n_pairs", set.n_pairs()}};
  out << header.dump() << '\n';
  for (const auto& e : set.entries) {
    json j{{"type", "entry"},
           {"key", e.key},
           {"treated", units_json(e.treated)},
           {"controls", units_json(e.controls)},
           {"pre_rmspe", real(e.pre_rmspe)},
           {"distance", real(e.distance)},
           {"converged", e.converged},
           {"flags", e.flags}};
    out << j.dump() << '\n';
  }
  for (const auto& p : pools) {
    json members = json::array();
    for (const auto& m : p.contenders) members.push_back({{"id", m.id}, {"align_year", m.align_year}});
    json j{{"type", "pool"},
           {"treated", p.treated_id},
           {"y_w", p.treated_y_w},
           {"kind", to_string(p.kind)},
           {"caps_applied", p.caps_applied},
           {"survivors", p.survivors},
           {"contenders", std::move(members)}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing matches file: " + path);
}

MatchesFile read_matches_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matches file: " + path);
  MatchesFile file;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": malformed JSON");
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        file.matched.method = parse_match_method(j.at("method").get<std::string>());
        file.matched.outcome_kind = parse_outcome_kind(j.at("outcome").get<std::string>());
        file.matched.pool_kind = parse_pool_kind(j.at("pool").get<std::string>());
        file.matched.failures = j.at("failures").get<std::map<std::string, int>>();
        header = true;
      } else if (type == "entry") {
        MatchedEntry e;
        e.key = j.at("key").get<std::string>();
        e.treated = units_from(j.at("treated"));
        e.controls = units_from(j.at("controls"));
        e.pre_rmspe = real_from(j.at("pre_rmspe"));
        e.distance = real_from(j.at("distance"));
        e.converged = j.at("converged").get<bool>();
        e.flags = j.at("flags").get<std::vector<std::string>>();
        file.matched.entries.push_back(std::move(e));
      } else if (type == "pool") {
        CandidatePool p;
        p.treated_id = j.at("treated").get<std::string>();
        p.treated_y_w = j.at("y_w").get<int>();
        p.kind = parse_pool_kind(j.at("kind").get<std::string>());
        p.caps_applied = j.at("caps_applied").get<bool>();
        p.survivors = j.at("survivors").get<int>();
        for (const auto& m : j.at("contenders"))
          p.contenders.push_back({m.at("id").get<std::string>(), m.at("align_year").get<int>()});
        file.pools.push_back(std::move(p));
      } else {
        throw InvalidInput(path + ":" + std::to_string(line_no) + ": unknown record type " + type);
      }
    } catch (const json::exception& e) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw InvalidInput(path + ": missing header line");
  return file;
}

}  // namespace hatmatch
