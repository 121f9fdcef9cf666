#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "hatmatch/balance.hpp"
#include "hatmatch/csv.hpp"

using namespace hatmatch;

TEST(GroupDifference, DifferenceInWeightedMeans) {
  const auto c = group_difference({1, 2, 3, 10, 12}, {0, 0, 0, 1, 1}, {1, 1, 1, 1, 1});
  EXPECT_NEAR(c.coef, 11.0 - 2.0, 1e-12);
  EXPECT_EQ(c.n_obs, 5);
  const auto w = group_difference({1, 3, 10}, {0, 0, 1}, {3, 1, 1});
  EXPECT_NEAR(w.coef, 10.0 - 1.5, 1e-12);
}

TEST(GroupDifference, MissingGroupIsDegenerate) {
  const auto c = group_difference({1, 2}, {1, 1}, {1, 1});
  EXPECT_TRUE(c.degenerate);
  EXPECT_TRUE(std::isnan(c.coef));
}

namespace {

struct Fixture {
  PanelMap panels;
  MatchedSet set;
};

// Controls copy their treated unit except at t = 0 (year 2010), where they
// sit `gap` publications lower.
Fixture planted(double gap) {
  Fixture f;
  f.set.method = MatchMethod::Exact;
  for (int i = 0; i < 20; ++i) {
    std::map<int, int> pubs;
    for (int y = 2006; y <= 2012; ++y) pubs[y] = 5 + (i * 7 + y) % 9;
    auto treated = fixture::count_panel("t" + std::to_string(i), "D", 2006, pubs, {});
    auto cpubs = pubs;
    cpubs[2010] -= static_cast<int>(gap);
    auto control = fixture::count_panel("c" + std::to_string(i), "D", 2006, cpubs, {});
    f.panels.emplace(treated.author_id, treated);
    f.panels.emplace(control.author_id, control);
    f.set.entries.push_back({treated.author_id, {{treated.author_id, 2010, 1.0}},
                             {{control.author_id, 2010, 1.0}}, std::nan(""), std::nan(""), true, {}});
  }
  return f;
}

}  // namespace

TEST(BalanceTable, IdenticalSeriesGiveZeroCoefficients) {
  const auto f = planted(0);
  for (const auto& row : balance_table(f.set, f.set, f.panels, OutcomeKind::Publications)) {
    EXPECT_NEAR(row.exact.coef, 0.0, 1e-12);
    EXPECT_NEAR(row.refined.coef, 0.0, 1e-12);
  }
}

TEST(BalanceTable, PlantedGapStarsOnlyTheShiftedYear) {
  const auto f = planted(4);
  const auto rows = balance_table(f.set, f.set, f.panels, OutcomeKind::Publications);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    if (r.t == 0) {
      EXPECT_NEAR(r.exact.coef, 4.0, 1e-12);
      EXPECT_LT(r.exact.p, 0.05);
    } else {
      EXPECT_NEAR(r.exact.coef, 0.0, 1e-12);
      EXPECT_GT(r.exact.p, 0.05);
    }
  }
  const auto dir = fixture::temp_dir("balance");
  write_balance_csv((dir / "b.csv").string(), rows);
  const auto t = csv::read_file((dir / "b.csv").string());
  EXPECT_EQ(t.header, (csv::Row{"year", "coef_exact", "se_exact", "stars_exact", "coef_refined", "se_refined",
                                "stars_refined", "n_exact", "n_refined", "flags"}));
  for (const auto& r : t.rows) EXPECT_EQ(r[3].empty(), r[0] != "0");
}
