#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace graph_deconv {

/// Neighbor lists with each list sorted ascending; vertex ids are 0-based.
using AdjacencyList = std::vector<std::vector<std::size_t>>;

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Breadth-first search from `root` over vertices with `active[v]` set,
/// visiting neighbors in ascending order. Returns vertices in visit order and
/// fills `parent` (root gets kNoParent).
inline std::vector<std::size_t> bfs_visit(const AdjacencyList& adjacency,
                                          const std::vector<bool>& active,
                                          std::size_t root,
                                          std::vector<std::size_t>& parent) {
  std::vector<std::size_t> order;
  std::queue<std::size_t> frontier;
  parent[root] = kNoParent;
  std::vector<bool> seen(adjacency.size(), false);
  seen[root] = true;
  frontier.push(root);
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    order.push_back(v);
    for (std::size_t w : adjacency[v]) {
      if (!active[w] || seen[w]) continue;
      seen[w] = true;
      parent[w] = v;
      frontier.push(w);
    }
  }
  return order;
}

/// Connected components of the subgraph induced by `active`. Components are
/// listed by their lowest vertex; each vertex set is sorted ascending.
inline std::vector<std::vector<std::size_t>> connected_components(
    const AdjacencyList& adjacency, const std::vector<bool>& active) {
  std::vector<std::vector<std::size_t>> components;
  std::vector<bool> assigned(adjacency.size(), false);
  std::vector<std::size_t> parent(adjacency.size(), kNoParent);
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    if (!active[v] || assigned[v]) continue;
    auto members = bfs_visit(adjacency, active, v, parent);
    for (std::size_t w : members) assigned[w] = true;
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

inline bool is_connected(const AdjacencyList& adjacency) {
  if (adjacency.empty()) return true;
  const std::vector<bool> all(adjacency.size(), true);
  return connected_components(adjacency, all).size() == 1;
}

} // namespace graph_deconv
