#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace wsc::flow {

// Successive-shortest-paths min-cost max-flow with Dijkstra potentials.
// Integer capacities and costs only, so transportation instances whose
// supplies, demands and costs are integral are solved exactly. Costs must be
// nonnegative; total cost is accumulated in 128-bit to avoid overflow.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes);

  // Returns the edge id of the forward edge.
  int add_edge(int from, int to, long long cap, long long cost);

  // Sends up to `want` units from s to t. Returns (flow sent, total cost).
  std::pair<long long, __int128> solve(int s, int t, long long want);

  long long edge_flow(int id) const;

 private:
  struct Edge {
    int to;
    long long cap;
    long long cost;
    int rev;
  };
  int n_;
  std::vector<std::vector<Edge>> g_;
  std::vector<std::pair<int, int>> edge_pos_;
};

}  // namespace wsc::flow
