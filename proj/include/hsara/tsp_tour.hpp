#pragma once

#include <functional>
#include <vector>

#include "hsara/instance.hpp"

namespace hsara {

// Rooted spanning tree over local vertex ids 0..size-1.
struct SpanningTree {
  int root = 0;
  std::vector<int> parent;                 // parent[root] == -1
  std::vector<std::vector<int>> children;  // ascending vertex id
  double weight = 0.0;
};

// Symmetric edge weight between two local vertex ids.
using EdgeWeight = std::function<double(int, int)>;

// Dense O(V^2) Prim from `root`. Weights may be negative. Ties go to the
// lexicographically smaller (min, max) edge.
SpanningTree prim_mst(int vertex_count, const EdgeWeight& weight, int root = 0);

// MST of the complete graph on {0..n} with weights c_t * t_ij, rooted at the depot.
SpanningTree minimum_spanning_tree(const Instance& instance);

// Vertices in first-visit order of a preorder walk, children ascending.
std::vector<int> preorder(const SpanningTree& tree);

struct GiantTour {
  std::vector<int> order;  // permutation of {0..n}, order[0] == 0
  double cost = 0.0;       // c_t * travel over consecutive pairs and the closing arc
};

double closed_tour_cost(const Instance& instance, const std::vector<int>& order);

// MST preorder walk; at most twice the optimal tour under the triangle inequality.
GiantTour approx_tsp_tour(const Instance& instance);

}  // namespace hsara
