#include "hsara/tsp_tour.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace hsara {

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

SpanningTree prim_mst(int vertex_count, const EdgeWeight& weight, int root) {
  SpanningTree tree;
  tree.root = root;
  tree.parent.assign(vertex_count, -1);
  tree.children.assign(vertex_count, {});
  if (vertex_count <= 1) return tree;

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> key(vertex_count, inf);
  std::vector<bool> in_tree(vertex_count, false);
  in_tree[root] = true;
  for (int v = 0; v < vertex_count; ++v) {
    if (v == root) continue;
    key[v] = weight(root, v);
    tree.parent[v] = root;
  }

  for (int added = 1; added < vertex_count; ++added) {
    int best = -1;
    for (int v = 0; v < vertex_count; ++v) {
      if (in_tree[v]) continue;
      if (best < 0 || key[v] < key[best] ||
          (key[v] == key[best] &&
           edge_key(tree.parent[v], v) < edge_key(tree.parent[best], best)))
        best = v;
    }
    in_tree[best] = true;
    tree.weight += key[best];
    for (int v = 0; v < vertex_count; ++v) {
      if (in_tree[v]) continue;
      const double w = weight(best, v);
      if (w < key[v] || (w == key[v] && edge_key(best, v) < edge_key(tree.parent[v], v))) {
        key[v] = w;
        tree.parent[v] = best;
      }
    }
  }
  // Children ascending: appending in vertex order keeps each list sorted.
  for (int v = 0; v < vertex_count; ++v)
    if (tree.parent[v] >= 0) tree.children[tree.parent[v]].push_back(v);
  return tree;
}

SpanningTree minimum_spanning_tree(const Instance& instance) {
  const double ct = instance.costs.travel;
  return prim_mst(instance.node_count(), [&](int i, int j) {
    auto [a, b] = edge_key(i, j);
    return ct * instance.travel(a, b);
  });
}

std::vector<int> preorder(const SpanningTree& tree) {
  std::vector<int> order;
  order.reserve(tree.parent.size());
  std::vector<int> stack{tree.root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& kids = tree.children[v];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

double closed_tour_cost(const Instance& instance, const std::vector<int>& order) {
  double travel = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k)
    travel += instance.travel(order[k], order[(k + 1) % order.size()]);
  return instance.costs.travel * travel;
}

GiantTour approx_tsp_tour(const Instance& instance) {
  GiantTour tour;
  tour.order = preorder(minimum_spanning_tree(instance));
  tour.cost = closed_tour_cost(instance, tour.order);
  return tour;
}

}  // namespace hsara
