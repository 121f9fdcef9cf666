#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "hatmatch/assignment.hpp"
#include "oracles.hpp"

using namespace hatmatch;

namespace {

std::vector<AssignmentEdge> dense(const std::vector<std::vector<double>>& c) {
  std::vector<AssignmentEdge> e;
  for (int i = 0; i < static_cast<int>(c.size()); ++i)
    for (int j = 0; j < static_cast<int>(c[i].size()); ++j)
      if (std::isfinite(c[i][j])) e.push_back({i, j, c[i][j]});
  return e;
}

}  // namespace

TEST(MinCostAssignment, TwoByTwo) {
  const auto r = min_cost_assignment(2, 2, dense({{1, 2}, {2, 100}}));
  EXPECT_EQ(r.row_to_col, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(r.total_cost, 4.0);
}

TEST(MinCostAssignment, IntegerCostsMatchBruteForceExactly) {
  std::mt19937 gen(101);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + gen() % 6;
    std::vector<std::vector<double>> c(n, std::vector<double>(n));
    for (auto& r : c)
      for (auto& v : r) v = static_cast<double>(gen() % 100);
    const auto r = min_cost_assignment(n, n, dense(c));
    EXPECT_EQ(r.matched, n);
    EXPECT_EQ(r.total_cost, oracle::brute_force_assignment(c));
    double recomputed = 0.0;
    for (int i = 0; i < n; ++i) recomputed += c[i][r.row_to_col[i]];
    EXPECT_EQ(recomputed, r.total_cost);
  }
}

TEST(MinCostAssignment, SparseGraphKeepsMaximumCardinality) {
  const double inf = std::numeric_limits<double>::infinity();
  // Row 0 can take either column, row 1 only column 0: cardinality forces (0,1),(1,0).
  const auto r = min_cost_assignment(2, 2, dense({{0, 5}, {9, inf}}));
  EXPECT_EQ(r.matched, 2);
  EXPECT_EQ(r.row_to_col, (std::vector<int>{1, 0}));
  const auto lone = min_cost_assignment(3, 1, dense({{3}, {1}, {2}}));
  EXPECT_EQ(lone.matched, 1);
  EXPECT_EQ(lone.row_to_col, (std::vector<int>{-1, 0, -1}));
}

TEST(MinCostAssignment, EmptyGraph) {
  const auto r = min_cost_assignment(3, 0, {});
  EXPECT_EQ(r.matched, 0);
  EXPECT_EQ(r.row_to_col, (std::vector<int>{-1, -1, -1}));
}
