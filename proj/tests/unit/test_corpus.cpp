#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "hatmatch/corpus.hpp"
#include "hatmatch/error.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace hatmatch;
using nlohmann::json;

namespace {

std::string flat_line(const std::string& id, int year, const std::vector<std::string>& authors,
                      const std::vector<std::string>& refs = {},
                      const std::vector<std::pair<std::string, int>>& topics = {}) {
  json j;
  j["id"] = id;
  j["year"] = year;
  j["authors"] = json::array();
  for (const auto& a : authors) j["authors"].push_back({{"id", a}, {"institutions", {"I" + a}}});
  j["countries"] = json::object();
  for (const auto& a : authors) j["countries"]["I" + a] = "US";
  j["topics"] = json::array();
  for (const auto& [t, l] : topics) j["topics"].push_back({{"id", t}, {"level", l}});
  j["references"] = refs;
  return j.dump();
}

std::vector<PublicationRecord> parse(const std::string& text, CorpusStats& stats,
                                     WorksFormat f = WorksFormat::Flat) {
  std::istringstream in(text);
  return parse_works(in, f, stats);
}

}  // namespace

TEST(ParseWorks, OpenAlexLineMapsFields) {
  const std::string line = R"({"id":"W1","publication_year":2010,
    "authorships":[{"author":{"id":"A1"},"institutions":[{"id":"I1","country_code":"US"}]},
                   {"author":{"id":"A2"},"institutions":[{"id":"I2","country_code":"CN"}]}],
    "concepts":[{"id":"C0","level":0},{"id":"C2","level":2}],
    "referenced_works":["W0"]})";
  std::string one_line = line;
  std::replace(one_line.begin(), one_line.end(), '\n', ' ');
  CorpusStats stats;
  const auto recs = parse(one_line + "\n", stats, WorksFormat::OpenAlexWorks);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].year, 2010);
  ASSERT_EQ(recs[0].authorships.size(), 2u);
  EXPECT_EQ(recs[0].institution_countries.at("I2"), "CN");
  EXPECT_EQ(recs[0].references, std::vector<std::string>{"W0"});
  EXPECT_EQ(recs[0].topics.size(), 2u);
}

TEST(ParseWorks, MissingYearIsDroppedWithReason) {
  CorpusStats stats;
  const auto recs = parse(R"({"id":"W1","authors":[{"id":"A"}]})" "\n", stats);
  EXPECT_TRUE(recs.empty());
  EXPECT_EQ(stats.records_dropped["no_year"], 1);
}

TEST(ParseWorks, MalformedLineIsCountedNotFatal) {
  CorpusStats stats;
  const std::string text = flat_line("W1", 2010, {"A"}) + "\n{not json\n" + flat_line("W2", 2011, {"B"}) + "\n";
  const auto recs = parse(text, stats);
  EXPECT_EQ(recs.size(), 2u);
  EXPECT_EQ(stats.total_dropped(), 1);
  EXPECT_EQ(stats.records_read, 3);
}

TEST(ParseWorks, EmptyAuthorshipsAndOutOfRangeYearsAreDropped) {
  CorpusStats stats;
  const std::string text = R"({"id":"W1","year":2010,"authors":[]})" "\n" + flat_line("W2", 1999, {"A"}) + "\n" +
                           flat_line("W3", 2022, {"A"}) + "\n";
  EXPECT_TRUE(parse(text, stats).empty());
  EXPECT_EQ(stats.total_dropped(), 3);
}

TEST(ParseWorks, DuplicateAuthorsCollapse) {
  CorpusStats stats;
  const auto recs = parse(flat_line("W1", 2010, {"A", "A", "B"}) + "\n", stats);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].authorships.size(), 2u);
}

TEST(ParseWorks, UnreadableFileIsFatal) {
  CorpusStats stats;
  EXPECT_THROW(read_works_files({"/nonexistent/works.jsonl"}, WorksFormat::Flat, stats), IoError);
}

TEST(BuildPanels, CountsPublicationsPerYear) {
  CorpusStats stats;
  const auto recs = parse(flat_line("P1", 2005, {"X"}) + "\n" + flat_line("P2", 2005, {"X"}) + "\n" +
                              flat_line("P3", 2006, {"X"}) + "\n",
                          stats);
  const auto panels = build_panels(recs, stats);
  const auto& x = panels.at("X");
  EXPECT_EQ(x.pubs_by_year, (std::map<Year, int>{{2005, 2}, {2006, 1}}));
  EXPECT_EQ(x.y0, 2005);
  EXPECT_EQ(x.total_pubs, 3);
}

TEST(BuildPanels, CitationInFollowingYear) {
  CorpusStats stats;
  const auto recs = parse(flat_line("A", 2010, {"X"}) + "\n" + flat_line("B", 2011, {"Y"}, {"A"}) + "\n", stats);
  const auto panels = build_panels(recs, stats);
  EXPECT_EQ(panels.at("X").cites(2011), 1);
  EXPECT_EQ(panels.at("X").total_cites, 1);
  EXPECT_EQ(panels.at("Y").total_cites, 0);
}

TEST(BuildPanels, PaperListingItselfIsIgnored) {
  CorpusStats stats;
  const auto recs = parse(flat_line("A", 2010, {"X"}, {"A"}) + "\n" + flat_line("B", 2012, {"Y"}, {"A", "A"}) + "\n", stats);
  const auto panels = build_panels(recs, stats);
  EXPECT_EQ(panels.at("X").total_cites, 1);
  EXPECT_EQ(panels.at("X").cites(2012), 1);
}

TEST(BuildPanels, TenPaperGraphMatchesBruteForceTally) {
  std::vector<oracle::TallyPaper> papers = {
      {"p0", 2001, {"a", "b"}, {}},          {"p1", 2002, {"a"}, {"p0"}},
      {"p2", 2003, {"c"}, {"p0", "p1"}},     {"p3", 2003, {"b", "c"}, {"p1", "p9x"}},
      {"p4", 2004, {"d"}, {"p2", "p3"}},     {"p5", 2005, {"a", "d"}, {"p0", "p3", "p4"}},
      {"p6", 2005, {"e"}, {"p5", "p5"}},     {"p7", 2006, {"b"}, {"p0", "p1", "p2", "p3"}},
      {"p8", 2007, {"c", "e"}, {"p6", "p7"}}, {"p9", 2008, {"a"}, {"p8", "p5", "p1"}}};
  std::string text;
  for (const auto& p : papers) text += flat_line(p.id, p.year, p.authors, p.references) + "\n";
  CorpusStats stats;
  const auto panels = build_panels(parse(text, stats), stats);
  const auto tally = oracle::tally_citations(papers);
  for (const auto& [id, panel] : panels) {
    std::map<int, long> got;
    for (const auto& [y, n] : panel.cites_by_year)
      if (n) got[y] = n;
    const auto it = tally.find(id);
    EXPECT_EQ(got, (it == tally.end() ? std::map<int, long>{} : it->second)) << id;
  }
}

TEST(BuildPanels, RandomCorporaMatchTallyAndConserveAuthorships) {
  std::mt19937 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<oracle::TallyPaper> papers;
    const int n = 60;
    for (int i = 0; i < n; ++i) {
      oracle::TallyPaper p{"q" + std::to_string(i), 2000 + static_cast<int>(gen() % 20), {}, {}};
      const int na = 1 + gen() % 4;
      for (int a = 0; a < na; ++a) p.authors.push_back("u" + std::to_string(gen() % 15));
      const int nr = gen() % 5;
      for (int r = 0; r < nr; ++r) {
        const auto ref = "q" + std::to_string(gen() % (n + 5));
        if (ref != p.id) p.references.push_back(ref);  // a paper listing itself is not a citation
      }
      papers.push_back(p);
    }
    std::string text;
    std::size_t authorships = 0;
    for (const auto& p : papers) {
      text += flat_line(p.id, p.year, p.authors, p.references) + "\n";
      authorships += std::set<std::string>(p.authors.begin(), p.authors.end()).size();
    }
    CorpusStats stats;
    const auto panels = build_panels(parse(text, stats), stats);
    const auto tally = oracle::tally_citations(papers);
    std::size_t pubs = 0;
    for (const auto& [id, panel] : panels) {
      pubs += panel.total_pubs;
      EXPECT_EQ(panel.y0, panel.pubs_by_year.begin()->first);
      for (const auto& [y, c] : panel.collaborators_by_year) EXPECT_EQ(c.count(id), 0u);
      std::map<int, long> got;
      for (const auto& [y, c] : panel.cites_by_year)
        if (c) got[y] = c;
      const auto it = tally.find(id);
      EXPECT_EQ(got, (it == tally.end() ? std::map<int, long>{} : it->second));
    }
    EXPECT_EQ(pubs, authorships);
  }
}

TEST(BuildPanels, IndependentOfRecordOrder) {
  std::string text;
  std::vector<std::string> lines;
  for (int i = 0; i < 30; ++i)
    lines.push_back(flat_line("r" + std::to_string(i), 2000 + i % 7, {"a" + std::to_string(i % 4), "b"},
                              {"r" + std::to_string((i * 7) % 30)}, {{"T" + std::to_string(i % 3), 0}}));
  auto build = [](const std::vector<std::string>& ls) {
    std::string t;
    for (const auto& l : ls) t += l + "\n";
    CorpusStats stats;
    std::istringstream in(t);
    return build_panels(parse_works(in, WorksFormat::Flat, stats), stats);
  };
  const auto base = build(lines);
  std::mt19937 gen(5);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(lines.begin(), lines.end(), gen);
    EXPECT_EQ(build(lines), base);
  }
}

TEST(BuildPanels, DisciplineTieBreaksLexicographically) {
  CorpusStats stats;
  const auto recs = parse(flat_line("A", 2010, {"X"}, {}, {{"Zeta", 0}}) + "\n" +
                              flat_line("B", 2011, {"X"}, {}, {{"Alpha", 0}, {"Deep", 2}}) + "\n",
                          stats);
  const auto panels = build_panels(recs, stats);
  EXPECT_EQ(panels.at("X").discipline, "Alpha");
  EXPECT_EQ(panels.at("X").topics_by_year.at(2011), std::set<std::string>{"Deep"});
}

TEST(BuildPanels, SelfCitationsCanBeExcluded) {
  CorpusStats stats;
  const auto recs = parse(flat_line("A", 2010, {"X"}) + "\n" + flat_line("B", 2011, {"X"}, {"A"}) + "\n", stats);
  EXPECT_EQ(build_panels(recs, stats).at("X").total_cites, 1);
  EXPECT_EQ(build_panels(recs, stats, {false}).at("X").total_cites, 0);
}

TEST(FilterEligible, MinimumPublicationsBoundary) {
  PanelMap panels;
  auto nine = fixture::count_panel("nine", "D", 2005, {{2005, 9}}, {});
  auto ten = fixture::count_panel("ten", "D", 2000, {{2000, 10}}, {});
  panels.emplace(nine.author_id, nine);
  panels.emplace(ten.author_id, ten);
  const auto kept = filter_eligible(panels, {});
  EXPECT_EQ(kept.count("nine"), 0u);
  EXPECT_EQ(kept.count("ten"), 1u);
}

TEST(FilterEligible, RosterMemberStartingAfter2015IsExcluded) {
  PanelMap panels;
  auto late = fixture::count_panel("late", "D", 2016, {{2016, 12}}, {});
  panels.emplace(late.author_id, late);
  EXPECT_TRUE(filter_eligible(panels, {}, {"late"}).empty());
  EXPECT_EQ(filter_eligible(panels, {}).size(), 1u);
}

TEST(FilterEligible, StatsInvariant) {
  CorpusStats stats;
  std::string text;
  for (int i = 0; i < 12; ++i) text += flat_line("w" + std::to_string(i), 2005 + i % 3, {"many", "few" + std::to_string(i % 2)}) + "\n";
  const auto panels = build_panels(parse(text, stats), stats);
  filter_eligible(panels, {}, {}, &stats);
  EXPECT_LE(stats.authors_eligible, stats.authors_built);
  EXPECT_EQ(stats.authors_eligible, 1);
}

TEST(PanelIo, RoundTrip) {
  CorpusStats stats;
  std::string text;
  for (int i = 0; i < 8; ++i)
    text += flat_line("x" + std::to_string(i), 2003 + i, {"a", "b" + std::to_string(i % 3)}, {"x0"}, {{"T", 0}, {"S", 2}}) + "\n";
  const auto panels = build_panels(parse(text, stats), stats);
  std::stringstream buf;
  write_panels(buf, panels);
  EXPECT_EQ(read_panels(buf), panels);
}
