#include "hatmatch/assignment.hpp"

#include <limits>
#include <queue>

#include "hatmatch/error.hpp"

namespace hatmatch {

namespace {

struct Arc {
  int to;
  int rev;
  int cap;
  double cost;
};

}  // namespace

AssignmentResult min_cost_assignment(int rows, int cols, std::span<const AssignmentEdge> edges) {
  const int source = rows + cols, sink = source + 1, n = sink + 1;
  std::vector<std::vector<Arc>> g(static_cast<std::size_t>(n));
  auto add = [&](int u, int v, double cost) {
    g[u].push_back({v, static_cast<int>(g[v].size()), 1, cost});
    g[v].push_back({u, static_cast<int>(g[u].size()) - 1, 0, -cost});
  };
  for (int r = 0; r < rows; ++r) add(source, r, 0.0);
  for (const auto& e : edges) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw InvalidInput("assignment edge index out of range");
    if (e.cost < 0.0) throw InvalidInput("assignment costs must be non-negative");
    add(e.row, rows + e.col, e.cost);
  }
  for (int c = 0; c < cols; ++c) add(rows + c, sink, 0.0);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(static_cast<std::size_t>(n), 0.0), dist(static_cast<std::size_t>(n));
  std::vector<int> prev_node(static_cast<std::size_t>(n)), prev_arc(static_cast<std::size_t>(n));

  AssignmentResult res;
  res.row_to_col.assign(static_cast<std::size_t>(rows), -1);
  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    dist[source] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (int i = 0; i < static_cast<int>(g[u].size()); ++i) {
        const Arc& a = g[u][i];
        if (a.cap <= 0) continue;
        // Reduced costs are >= 0 up to rounding; clamp keeps Dijkstra valid.
        const double rc = std::max(0.0, a.cost + potential[u] - potential[a.to]);
        if (dist[u] + rc < dist[a.to]) {
          dist[a.to] = dist[u] + rc;
          prev_node[a.to] = u;
          prev_arc[a.to] = i;
          heap.emplace(dist[a.to], a.to);
        }
      }
    }
    if (dist[sink] == kInf) break;
    for (int v = 0; v < n; ++v)
      if (dist[v] < kInf) potential[v] += dist[v];
    for (int v = sink; v != source; v = prev_node[v]) {
      Arc& a = g[prev_node[v]][prev_arc[v]];
      a.cap -= 1;
      g[v][a.rev].cap += 1;
    }
    ++res.matched;
  }

  for (int r = 0; r < rows; ++r) {
    for (const auto& a : g[r]) {
      if (a.to >= rows && a.to < rows + cols && a.cap == 0 && a.cost >= 0.0) {
        res.row_to_col[r] = a.to - rows;
        res.total_cost += a.cost;
        break;
      }
    }
  }
  return res;
}

}  // namespace hatmatch
