#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hatmatch/corpus.hpp"

namespace fixture {

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::path(HATMATCH_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Panel with one paper per listed year in the given country.
inline hatmatch::AuthorYearPanel country_panel(const std::string& id,
                                               const std::map<int, std::set<std::string>>& countries) {
  hatmatch::AuthorYearPanel p;
  p.author_id = id;
  for (const auto& [year, cc] : countries) {
    p.pubs_by_year[year] = 1;
    if (!cc.empty()) p.country_by_year[year] = cc;
    ++p.total_pubs;
  }
  p.y0 = p.pubs_by_year.empty() ? 0 : p.pubs_by_year.begin()->first;
  p.discipline = "D";
  return p;
}

inline std::map<int, std::set<std::string>> years(int first, int last, const std::string& cc) {
  std::map<int, std::set<std::string>> out;
  for (int y = first; y <= last; ++y) out[y] = {cc};
  return out;
}

inline std::map<int, std::set<std::string>> join(std::map<int, std::set<std::string>> a,
                                                 const std::map<int, std::set<std::string>>& b) {
  for (const auto& [y, c] : b) a[y].insert(c.begin(), c.end());
  return a;
}

// Panel with given yearly publication and citation counts.
inline hatmatch::AuthorYearPanel count_panel(const std::string& id, const std::string& discipline, int y0,
                                             const std::map<int, int>& pubs,
                                             const std::map<int, std::int64_t>& cites) {
  hatmatch::AuthorYearPanel p;
  p.author_id = id;
  p.discipline = discipline;
  p.y0 = y0;
  p.pubs_by_year = pubs;
  p.cites_by_year = cites;
  for (const auto& [y, n] : pubs) p.total_pubs += n;
  for (const auto& [y, n] : cites) p.total_cites += n;
  return p;
}

}  // namespace fixture
