#include <gtest/gtest.h>

#include <algorithm>
#include <deque>

#include "fixtures.hpp"
#include "hatmatch/matching.hpp"

using namespace hatmatch;

namespace {

// Puts `pubs` publications and `cites` citations into 2007 (inside the
// five years before a 2010 move) plus a late paper in `last_year`.
AuthorYearPanel pre_totals(const std::string& id, int pubs, int cites, const std::string& disc = "D",
                           int y0 = 2003, int last_year = 2018) {
  auto p = fixture::count_panel(id, disc, y0, {{y0, 1}, {2007, pubs}, {last_year, 1}}, {{2007, cites}});
  return p;
}

struct Pool {
  std::deque<AuthorYearPanel> panels;
  std::vector<Contender> contenders;
  void add(AuthorYearPanel p, Group g, std::optional<Year> y_w = std::nullopt) {
    panels.push_back(std::move(p));
    contenders.push_back({&panels.back(), g, y_w});
  }
};

}  // namespace

TEST(Log2Bin, Values) {
  EXPECT_EQ(log2_bin(0), 0);
  EXPECT_EQ(log2_bin(1), 1);
  EXPECT_EQ(log2_bin(12), 3);
  EXPECT_EQ(log2_bin(47), 5);
  EXPECT_EQ(log2_bin(40), 5);
}

TEST(ExactMatch, BinArithmeticRetainsNeighbour) {
  // The career-start paper (2005) falls inside the window: totals 12/40 vs 13/47.
  const auto t = pre_totals("t", 11, 40, "D", 2005);
  Pool pool;
  pool.add(pre_totals("c", 12, 47, "D", 2005), Group::G2);
  pool.add(pre_totals("far", 40, 47, "D", 2005), Group::G2);
  pool.add(pre_totals("few_cites", 12, 20, "D", 2005), Group::G2);
  const auto r = exact_match(t, 2010, pool.contenders, PoolKind::Unmoved);
  ASSERT_EQ(r.contenders.size(), 1u);
  EXPECT_EQ(r.contenders[0].id, "c");
  EXPECT_EQ(r.contenders[0].align_year, 2010);
}

TEST(ExactMatch, HardFilters) {
  const auto t = pre_totals("t", 5, 5);
  Pool pool;
  pool.add(pre_totals("disc", 5, 5, "Other"), Group::G2);
  pool.add(pre_totals("old", 5, 5, "D", 2001), Group::G2);
  pool.add(pre_totals("ok", 5, 5, "D", 2004), Group::G2);
  pool.add(pre_totals("quit", 5, 5, "D", 2003, 2010), Group::G2);
  pool.add(pre_totals("wrong_group", 5, 5), Group::G1, 2010);
  const auto r = exact_match(t, 2010, pool.contenders, PoolKind::Unmoved);
  ASSERT_EQ(r.contenders.size(), 1u);
  EXPECT_EQ(r.contenders[0].id, "ok");
  EXPECT_EQ(r.kind, PoolKind::Unmoved);
}

TEST(ExactMatch, MovedPoolUsesOwnMoveYearWithinTolerance) {
  const auto t = pre_totals("t", 5, 5);
  Pool pool;
  pool.add(pre_totals("near", 5, 5), Group::G1, 2011);
  pool.add(pre_totals("far", 5, 5), Group::G1, 2013);
  pool.add(pre_totals("stayer", 5, 5), Group::G2);
  const auto r = exact_match(t, 2010, pool.contenders, PoolKind::Moved);
  ASSERT_EQ(r.contenders.size(), 1u);
  EXPECT_EQ(r.contenders[0].id, "near");
  EXPECT_EQ(r.contenders[0].align_year, 2011);
}

TEST(ExactMatch, ZeroSurvivorsGiveEmptyPool) {
  Pool pool;
  pool.add(pre_totals("x", 100, 100), Group::G2);
  const auto r = exact_match(pre_totals("t", 1, 1), 2010, pool.contenders, PoolKind::Unmoved);
  EXPECT_TRUE(r.contenders.empty());
  EXPECT_EQ(r.survivors, 0);
}

TEST(ExactMatch, CapIsExactDeterministicAndMonotone) {
  const auto t = pre_totals("t", 5, 5);
  Pool pool;
  for (int i = 0; i < 450; ++i) pool.add(pre_totals("u" + std::to_string(1000 + i), 5, 5), Group::G2);
  const auto a = exact_match(t, 2010, pool.contenders, PoolKind::Unmoved, {}, {}, 42);
  const auto b = exact_match(t, 2010, pool.contenders, PoolKind::Unmoved, {}, {}, 42);
  EXPECT_EQ(a.contenders.size(), 300u);
  EXPECT_EQ(a.survivors, 450);
  EXPECT_TRUE(a.caps_applied);
  EXPECT_EQ(a.contenders, b.contenders);
  EXPECT_TRUE(std::is_sorted(a.contenders.begin(), a.contenders.end(),
                             [](const PoolMember& x, const PoolMember& y) { return x.id < y.id; }));

  std::vector<Contender> reversed(pool.contenders.rbegin(), pool.contenders.rend());
  EXPECT_EQ(exact_match(t, 2010, reversed, PoolKind::Unmoved, {}, {}, 42).contenders, a.contenders);

  const auto other_seed = exact_match(t, 2010, pool.contenders, PoolKind::Unmoved, {}, {}, 43);
  EXPECT_NE(other_seed.contenders, a.contenders);

  PoolCaps bigger;
  bigger.unmoved = 350;
  const auto c = exact_match(t, 2010, pool.contenders, PoolKind::Unmoved, bigger, {}, 42);
  EXPECT_EQ(c.contenders.size(), 350u);
  for (const auto& m : a.contenders) EXPECT_NE(std::find(c.contenders.begin(), c.contenders.end(), m), c.contenders.end());

  PoolCaps moved_cap;
  Pool movers;
  for (int i = 0; i < 250; ++i) movers.add(pre_totals("m" + std::to_string(i), 5, 5), Group::G1, 2010);
  EXPECT_EQ(exact_match(t, 2010, movers.contenders, PoolKind::Moved, moved_cap).contenders.size(), 200u);
}
