// Brute-force reference implementations used only by the tests. They share no
// code with the library beyond the Instance type.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hsara/instance.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Route cost from the raw instance fields.
inline double route_cost(const hsara::Instance& inst, const std::vector<int>& customers) {
  double travel = 0.0, service = 0.0;
  int prev = 0;
  for (int c : customers) {
    travel += inst.travel_mean(prev, c);
    service += inst.service_mean[c];
    prev = c;
  }
  travel += inst.travel_mean(prev, 0);
  const double overtime = std::max(0.0, travel + service - inst.horizon);
  return inst.costs.hiring + inst.costs.travel * travel + inst.costs.overtime * overtime;
}

// Reduced cost of a depot path: route cost minus the duals of its customers.
inline double reduced_cost(const hsara::Instance& inst, const std::vector<int>& customers,
                           const std::vector<double>& duals) {
  double rc = oracle::route_cost(inst, customers);
  for (int c : customers) rc -= duals[c];
  return rc;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Kruskal over the complete graph.
inline double kruskal_weight(int vertices, const std::function<double(int, int)>& w) {
  struct Edge {
    double w;
    int a, b;
  };
  std::vector<Edge> edges;
  for (int a = 0; a < vertices; ++a)
    for (int b = a + 1; b < vertices; ++b) edges.push_back({w(a, b), a, b});
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });
  DisjointSets ds(vertices);
  double total = 0.0;
  for (const Edge& e : edges)
    if (ds.unite(e.a, e.b)) total += e.w;
  return total;
}

// Optimal closed tour through the depot and all customers.
inline double optimal_tour(const hsara::Instance& inst) {
  std::vector<int> order(inst.n);
  std::iota(order.begin(), order.end(), 1);
  double best = kInf;
  do {
    double c = inst.travel_mean(0, order.front()) + inst.travel_mean(order.back(), 0);
    for (std::size_t k = 1; k < order.size(); ++k) c += inst.travel_mean(order[k - 1], order[k]);
    best = std::min(best, c);
  } while (std::next_permutation(order.begin(), order.end()));
  return inst.costs.travel * best;
}

// Cheapest way to cut `sequence` into consecutive blocks, each block paying
// its route cost minus prizes. Every one of the 2^(m-1) cut patterns is tried.
inline double best_contiguous_split(const hsara::Instance& inst, const std::vector<int>& sequence,
                                    const std::vector<double>& prizes = {}) {
  const int m = static_cast<int>(sequence.size());
  double best = kInf;
  for (unsigned mask = 0; mask < (1u << (m - 1)); ++mask) {
    double total = 0.0;
    std::vector<int> block;
    for (int k = 0; k < m; ++k) {
      block.push_back(sequence[k]);
      const bool cut = k == m - 1 || (mask >> k & 1u);
      if (!cut) continue;
      total += prizes.empty() ? oracle::route_cost(inst, block) : reduced_cost(inst, block, prizes);
      block.clear();
    }
    best = std::min(best, total);
  }
  return best;
}

// Calls f on every elementary depot path (nonempty ordered customer subset).
inline void for_each_elementary_path(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> path;
  std::vector<bool> used(n + 1, false);
  std::function<void()> grow = [&] {
    for (int c = 1; c <= n; ++c) {
      if (used[c]) continue;
      used[c] = true;
      path.push_back(c);
      f(path);
      grow();
      path.pop_back();
      used[c] = false;
    }
  };
  grow();
}

struct BestPath {
  std::vector<int> customers;
  double reduced_cost = kInf;
};

inline BestPath best_elementary_path(const hsara::Instance& inst, const std::vector<double>& duals) {
  BestPath best;
  for_each_elementary_path(inst.n, [&](const std::vector<int>& p) {
    const double rc = reduced_cost(inst, p, duals);
    if (rc < best.reduced_cost) best = {p, rc};
  });
  return best;
}

// Minimum SAR cost by recursion over set partitions: the lowest unassigned
// customer opens a block, every block is costed by its best ordering.
inline double best_partition(const hsara::Instance& inst) {
  std::function<double(std::vector<int>)> best_order = [&](std::vector<int> block) {
    std::sort(block.begin(), block.end());
    double b = kInf;
    do b = std::min(b, oracle::route_cost(inst, block));
    while (std::next_permutation(block.begin(), block.end()));
    return b;
  };
  std::function<double(std::vector<int>)> solve = [&](std::vector<int> rest) -> double {
    if (rest.empty()) return 0.0;
    const int head = rest.front();
    const std::vector<int> others(rest.begin() + 1, rest.end());
    double best = kInf;
    const int k = static_cast<int>(others.size());
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      std::vector<int> block{head}, remain;
      for (int i = 0; i < k; ++i) (mask >> i & 1u ? block : remain).push_back(others[i]);
      best = std::min(best, best_order(block) + solve(remain));
    }
    return best;
  };
  std::vector<int> all(inst.n);
  std::iota(all.begin(), all.end(), 1);
  return solve(all);
}

// Small dense LP: minimise c x subject to A x <= b and x >= 0, solved by
// enumerating every vertex (intersection of `vars` tight constraints).
struct SmallLp {
  std::vector<double> c;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
};

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m,
                                                       std::vector<double> r) {
  const int n = static_cast<int>(r.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
    if (std::abs(m[piv][col]) < 1e-10) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(r[piv], r[col]);
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = m[i][col] / m[col][col];
      for (int j = col; j < n; ++j) m[i][j] -= f * m[col][j];
      r[i] -= f * r[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = r[i] / m[i][i];
  return x;
}

// Best vertex value, or nullopt if no vertex is feasible. Callers keep the
// region bounded.
inline std::optional<double> vertex_enumeration(const SmallLp& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int rows = static_cast<int>(lp.b.size());
  // Constraint k < rows is a_k x <= b_k; k >= rows is -x_{k-rows} <= 0.
  auto coeff = [&](int k, int j) { return k < rows ? lp.a[k][j] : (k - rows == j ? -1.0 : 0.0); };
  auto rhs = [&](int k) { return k < rows ? lp.b[k] : 0.0; };
  const int total = rows + n;
  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == n) {
      std::vector<std::vector<double>> m(n, std::vector<double>(n));
      std::vector<double> r(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = coeff(pick[i], j);
        r[i] = rhs(pick[i]);
      }
      const auto x = solve_square(m, r);
      if (!x) return;
      for (int k = 0; k < total; ++k) {
        double act = 0.0;
        for (int j = 0; j < n; ++j) act += coeff(k, j) * (*x)[j];
        if (act > rhs(k) + 1e-7) return;
      }
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += lp.c[j] * (*x)[j];
      if (!best || v < *best) best = v;
      return;
    }
    for (int k = start; k < total; ++k) {
      pick[depth] = k;
      choose(k + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

// Minimise c x over binary x with A x <= b, by trying all 2^n points.
inline std::optional<double> binary_enumeration(const SmallLp& ip) {
  const int n = static_cast<int>(ip.c.size());
  std::optional<double> best;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < ip.b.size() && ok; ++i) {
      double act = 0.0;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1u) act += ip.a[i][j];
      ok = act <= ip.b[i] + 1e-9;
    }
    if (!ok) continue;
    double v = 0.0;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) v += ip.c[j];
    if (!best || v < *best) best = v;
  }
  return best;
}

// Instance on a line: depot at 0, customers at the given positions.
inline hsara::Instance line_instance(const std::vector<double>& positions, double service,
                                     hsara::CostParams costs = {}, double horizon = 250.0) {
  hsara::Instance inst;
  inst.n = static_cast<int>(positions.size());
  inst.coords.push_back({0.0, 0.0});
  for (double p : positions) inst.coords.push_back({p, 0.0});
  inst.travel_mean = hsara::euclidean_travel(inst.coords);
  inst.service_mean.assign(inst.n + 1, service);
  inst.service_mean[0] = 0.0;
  inst.cancel_prob.assign(inst.n + 1, 0.0);
  inst.horizon = horizon;
  inst.costs = costs;
  return inst;
}

}  // namespace oracle
