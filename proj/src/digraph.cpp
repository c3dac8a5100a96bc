#include "gvb/digraph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <utility>

namespace gvb {

std::vector<std::size_t> strongly_connected_components(const Adjacency& adj, std::size_t* count) {
  const std::size_t n = adj.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0, next_comp = 0;

  // Explicit call stack of (vertex, next child position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      auto& [v, child] = frames.back();
      if (child == 0 && index[v] == unvisited) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (child < adj[v].size()) {
        const std::size_t w = adj[v][child++];
        if (index[w] == unvisited) {
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
      const std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

int max_component_period(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::size_t ncomp = 0;
  const auto comp = strongly_connected_components(adj, &ncomp);

  std::vector<long> level(n, -1);
  std::vector<long> period(ncomp, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (level[root] >= 0) continue;
    // BFS restricted to root's component.
    const std::size_t c = comp[root];
    level[root] = 0;
    std::queue<std::size_t> queue;
    queue.push(root);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop();
      for (std::size_t w : adj[v]) {
        if (comp[w] != c) continue;
        if (level[w] < 0) {
          level[w] = level[v] + 1;
          queue.push(w);
        } else {
          period[c] = std::gcd(period[c], std::labs(level[v] + 1 - level[w]));
        }
      }
    }
  }
  long best = 1;
  for (long p : period) best = std::max(best, p);
  return static_cast<int>(best);
}

std::vector<bool> reachable_from(const Adjacency& adj, std::size_t root) {
  std::vector<bool> seen(adj.size(), false);
  if (root >= adj.size()) return seen;
  std::vector<std::size_t> todo{root};
  seen[root] = true;
  while (!todo.empty()) {
    const std::size_t v = todo.back();
    todo.pop_back();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace gvb
