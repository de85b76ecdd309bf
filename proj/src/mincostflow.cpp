#include "wsc/mincostflow.hpp"

#include <limits>
#include <queue>

#include "wsc/error.hpp"

namespace wsc::flow {

MinCostFlow::MinCostFlow(int nodes) : n_(nodes), g_(nodes) {}

int MinCostFlow::add_edge(int from, int to, long long cap, long long cost) {
  if (cap < 0 || cost < 0) throw PreconditionError("flow edges need cap >= 0 and cost >= 0");
  g_[from].push_back({to, cap, cost, int(g_[to].size())});
  g_[to].push_back({from, 0, -cost, int(g_[from].size()) - 1});
  edge_pos_.push_back({from, int(g_[from].size()) - 1});
  return int(edge_pos_.size()) - 1;
}

std::pair<long long, __int128> MinCostFlow::solve(int s, int t, long long want) {
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> potential(n_, 0), dist(n_);
  std::vector<int> prev_node(n_), prev_edge(n_);
  long long flow = 0;
  __int128 cost = 0;
  while (flow < want) {
    dist.assign(n_, inf);
    dist[s] = 0;
    using Item = std::pair<long long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int e = 0; e < int(g_[u].size()); ++e) {
        const Edge& ed = g_[u][e];
        if (ed.cap <= 0) continue;
        long long nd = d + ed.cost + potential[u] - potential[ed.to];
        if (nd < dist[ed.to]) {
          dist[ed.to] = nd;
          prev_node[ed.to] = u;
          prev_edge[ed.to] = e;
          pq.push({nd, ed.to});
        }
      }
    }
    if (dist[t] >= inf) break;
    for (int v = 0; v < n_; ++v)
      if (dist[v] < inf) potential[v] += dist[v];
    long long push = want - flow;
    for (int v = t; v != s; v = prev_node[v])
      push = std::min(push, g_[prev_node[v]][prev_edge[v]].cap);
    for (int v = t; v != s; v = prev_node[v]) {
      Edge& ed = g_[prev_node[v]][prev_edge[v]];
      ed.cap -= push;
      g_[v][ed.rev].cap += push;
      cost += __int128(push) * ed.cost;
    }
    flow += push;
  }
  return {flow, cost};
}

long long MinCostFlow::edge_flow(int id) const {
  auto [u, idx] = edge_pos_[id];
  const Edge& ed = g_[u][idx];
  return g_[ed.to][ed.rev].cap;
}

}  // namespace wsc::flow
