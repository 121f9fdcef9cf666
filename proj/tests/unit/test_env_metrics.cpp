#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "hatmatch/env_metrics.hpp"
#include "hatmatch/error.hpp"
#include "oracles.hpp"

using namespace hatmatch;

namespace {

AuthorYearPanel env_panel() {
  // Pre window 2007..2011 (3 papers), post window 2012..2016 (4 papers).
  AuthorYearPanel p;
  p.author_id = "x";
  p.y0 = 2005;
  p.pubs_by_year = {{2005, 1}, {2008, 1}, {2010, 2}, {2012, 1}, {2013, 2}, {2016, 1}};
  p.collaborators_by_year = {{2008, {"a", "b"}}, {2010, {"b", "c"}}, {2012, {"c", "d"}}, {2013, {"e"}}, {2016, {"f", "a"}}};
  p.institutions_by_year = {{2008, {"i1"}}, {2010, {"i1", "i2"}}, {2012, {"i3"}}, {2013, {"i1"}}, {2016, {"i3"}}};
  p.topics_by_year = {{2008, {"t1"}}, {2010, {"t2"}}, {2012, {"t1", "t3"}}, {2013, {"t2"}}, {2016, {"t4"}}};
  p.teamsizes_by_year = {{2005, {9}}, {2008, {3}}, {2010, {2, 4}}, {2012, {3}}, {2013, {5, 5}}, {2016, {7}}};
  p.total_pubs = 8;
  return p;
}

}  // namespace

TEST(ChangeRate, Examples) {
  EXPECT_DOUBLE_EQ(change_rate({"a", "b", "c"}, {"b", "c", "d", "e"}), 0.5);
  EXPECT_DOUBLE_EQ(change_rate({"a", "b"}, {"a", "b"}), 0.0);
  EXPECT_DOUBLE_EQ(change_rate({"a"}, {"b", "c"}), 1.0);
  EXPECT_THROW(change_rate({"a"}, {}), UndefinedRateError);
}

TEST(ChangeRate, MatchesSetArithmeticOnRandomPairs) {
  std::mt19937 gen(21);
  for (int rep = 0; rep < 1000; ++rep) {
    std::set<std::string> before, after;
    const int nb = gen() % 12, na = 1 + gen() % 12;
    for (int i = 0; i < nb; ++i) before.insert("e" + std::to_string(gen() % 20));
    for (int i = 0; i < na; ++i) after.insert("e" + std::to_string(gen() % 20));
    const double r = change_rate(before, after);
    EXPECT_DOUBLE_EQ(r, oracle::set_change_rate(before, after));
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(EnvironmentDelta, HandBuiltFixture) {
  const auto d = environment_delta(env_panel(), 2012);
  // collaborators pre {a,b,c}, post {c,d,e,f,a} -> new {d,e,f} of 5
  EXPECT_DOUBLE_EQ(d.d_a, 3.0 / 5.0);
  // institutions pre {i1,i2}, post {i3,i1} -> 1 of 2
  EXPECT_DOUBLE_EQ(d.d_i, 0.5);
  // topics pre {t1,t2}, post {t1,t3,t2,t4} -> 2 of 4
  EXPECT_DOUBLE_EQ(d.d_c, 0.5);
  // team sizes pre {3,2,4} mean 3, post {3,5,5,7} mean 5; 2005 is outside the window
  EXPECT_DOUBLE_EQ(d.d_size, 2.0);
  EXPECT_EQ(d.pre_first, 2007);
  EXPECT_EQ(d.post_last, 2016);
}

TEST(EnvironmentDelta, NoChangeGivesZeros) {
  AuthorYearPanel p;
  p.author_id = "same";
  for (int y = 2005; y <= 2014; ++y) {
    p.pubs_by_year[y] = 1;
    p.collaborators_by_year[y] = {"a", "b"};
    p.institutions_by_year[y] = {"i"};
    p.topics_by_year[y] = {"t"};
    p.teamsizes_by_year[y] = {3};
  }
  const auto d = environment_delta(p, 2010);
  EXPECT_EQ(d.d_a, 0.0);
  EXPECT_EQ(d.d_i, 0.0);
  EXPECT_EQ(d.d_c, 0.0);
  EXPECT_EQ(d.d_size, 0.0);
}

TEST(EnvironmentDelta, TeamSizeDifference) {
  AuthorYearPanel p;
  p.author_id = "s";
  p.pubs_by_year = {{2009, 2}, {2011, 1}};
  p.teamsizes_by_year = {{2009, {4, 4}}, {2011, {6}}};
  p.collaborators_by_year = {{2009, {"a"}}, {2011, {"b"}}};
  p.institutions_by_year = {{2009, {"i"}}, {2011, {"i"}}};
  p.topics_by_year = {{2009, {"t"}}, {2011, {"t"}}};
  EXPECT_DOUBLE_EQ(environment_delta(p, 2010).d_size, 2.0);
}

TEST(EnvironmentDelta, EmptyPostWindowAndMissingTopics) {
  AuthorYearPanel p = env_panel();
  try {
    environment_delta(p, 2030);
    FAIL();
  } catch (const UndefinedRateError& e) {
    EXPECT_STREQ(e.what(), "empty_post_window");
  }
  p.topics_by_year.erase(2012);
  p.topics_by_year.erase(2013);
  p.topics_by_year.erase(2016);
  try {
    environment_delta(p, 2012);
    FAIL();
  } catch (const UndefinedRateError& e) {
    EXPECT_STREQ(e.what(), "undefined_d_c");
  }
}

TEST(EnvironmentDelta, InvariantToPaperPermutationWithinWindow) {
  auto p = env_panel();
  const auto base = environment_delta(p, 2012);
  std::reverse(p.teamsizes_by_year[2013].begin(), p.teamsizes_by_year[2013].end());
  std::swap(p.teamsizes_by_year[2012], p.teamsizes_by_year[2016]);
  std::swap(p.collaborators_by_year[2012], p.collaborators_by_year[2016]);
  const auto d = environment_delta(p, 2012);
  EXPECT_DOUBLE_EQ(d.d_a, base.d_a);
  EXPECT_DOUBLE_EQ(d.d_size, base.d_size);
}

TEST(Median, EvenAndOdd) {
  EXPECT_DOUBLE_EQ(median({4, 7, 9, 15}), 8.0);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_TRUE(std::isnan(median({})));
}

namespace {

AuthorYearPanel success_panel(int total_post) {
  AuthorYearPanel p;
  p.author_id = "s";
  p.pubs_by_year[2010] = 1;
  p.pubs_by_year[2012] = total_post;
  p.cites_by_year[2013] = total_post * 3;
  return p;
}

}  // namespace

TEST(SuccessOutcome, StrictComparison) {
  EXPECT_EQ(success_outcome(success_panel(12), 2010, OutcomeKind::Publications, 10, 2021).label, 1);
  EXPECT_EQ(success_outcome(success_panel(10), 2010, OutcomeKind::Publications, 10, 2021).label, 0);
  const double m = median({4, 7, 9, 15});
  EXPECT_EQ(success_outcome(success_panel(9), 2010, OutcomeKind::Publications, m, 2021).label, 1);
}

TEST(SuccessOutcome, WindowIsFiveYearsAfterMove) {
  auto p = success_panel(0);
  p.pubs_by_year = {{2010, 5}, {2011, 1}, {2015, 2}, {2016, 7}};
  EXPECT_DOUBLE_EQ(success_value(p, 2010, OutcomeKind::Publications), 3.0);
  const auto out = success_outcome(p, 2010, OutcomeKind::Citations, 0, 2021);
  EXPECT_DOUBLE_EQ(out.value, 0.0);
  EXPECT_FALSE(out.truncated);
  EXPECT_TRUE(success_outcome(p, 2018, OutcomeKind::Publications, 0, 2021).truncated);
}

TEST(SuccessOutcome, MedianSplitHalvesDistinctEvenSample) {
  std::mt19937 gen(4);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 * (1 + gen() % 20);
    std::set<int> distinct;
    while (static_cast<int>(distinct.size()) < n) distinct.insert(gen() % 500);
    std::vector<double> values(distinct.begin(), distinct.end());
    const double m = median(values);
    int ones = 0;
    for (double v : values) ones += success_outcome(success_panel(static_cast<int>(v)), 2010,
                                                    OutcomeKind::Publications, m, 2021).label;
    EXPECT_EQ(ones, n / 2);
  }
}
