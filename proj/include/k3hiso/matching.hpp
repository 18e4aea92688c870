#pragma once

#include <queue>
#include <vector>

namespace k3h {

// Hopcroft-Karp maximum bipartite matching on adjacency lists; returns the
// matching size. match_l/match_r (optional) receive the matched partner or -1.
inline int max_bipartite_matching(const std::vector<std::vector<int>>& adj, int right_size,
                                  std::vector<int>* match_l = nullptr,
                                  std::vector<int>* match_r = nullptr) {
  const int nl = static_cast<int>(adj.size());
  const int inf = 1 << 30;
  std::vector<int> ml(nl, -1), mr(right_size, -1), dist(nl);

  auto bfs = [&]() {
    std::queue<int> q;
    for (int u = 0; u < nl; ++u) {
      if (ml[u] == -1) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = inf;
      }
    }
    bool reachable = false;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        int w = mr[v];
        if (w == -1) {
          reachable = true;
        } else if (dist[w] == inf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return reachable;
  };

  std::function<bool(int)> dfs = [&](int u) {
    for (int v : adj[u]) {
      int w = mr[v];
      if (w == -1 || (dist[w] == dist[u] + 1 && dfs(w))) {
        ml[u] = v;
        mr[v] = u;
        return true;
      }
    }
    dist[u] = inf;
    return false;
  };

  int size = 0;
  while (bfs())
    for (int u = 0; u < nl; ++u)
      if (ml[u] == -1 && dfs(u)) ++size;

  if (match_l) *match_l = ml;
  if (match_r) *match_r = mr;
  return size;
}

// Perfect matching in a square bipartite compatibility matrix.
inline bool perfect_matching(const std::vector<std::vector<char>>& compat,
                             std::vector<int>* match_l = nullptr) {
  const int n = static_cast<int>(compat.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(compat[i].size()) != n) return false;
    for (int j = 0; j < n; ++j)
      if (compat[i][j]) adj[i].push_back(j);
  }
  std::vector<int> ml;
  int size = max_bipartite_matching(adj, n, &ml);
  if (match_l) *match_l = ml;
  return size == n;
}

}  // namespace k3h
