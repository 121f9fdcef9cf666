#pragma once

#include <span>
#include <vector>

namespace hatmatch {

struct AssignmentEdge {
  int row = 0;
  int col = 0;
  double cost = 0.0;  // must be >= 0
};

struct AssignmentResult {
  std::vector<int> row_to_col;  // -1 when the row stays unmatched
  double total_cost = 0.0;
  int matched = 0;
};

// Minimum-cost maximum-cardinality one-to-one matching on a sparse bipartite
// graph (successive shortest augmenting paths with Dijkstra potentials).
AssignmentResult min_cost_assignment(int rows, int cols, std::span<const AssignmentEdge> edges);

}  // namespace hatmatch
