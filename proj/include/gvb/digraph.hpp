#pragma once

#include <cstddef>
#include <vector>

namespace gvb {

/// Adjacency lists of a directed graph on vertices 0..n-1.
using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected component id per vertex (Tarjan, iterative).
std::vector<std::size_t> strongly_connected_components(const Adjacency& adj, std::size_t* count = nullptr);

/// Largest period over the nontrivial strongly connected components
/// (components that contain at least one cycle). Returns 1 for a graph
/// without cycles.
int max_component_period(const Adjacency& adj);

/// Vertices reachable from `root`.
std::vector<bool> reachable_from(const Adjacency& adj, std::size_t root);

}  // namespace gvb
