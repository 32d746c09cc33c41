#pragma once

#include <cmath>
#include <random>
#include <string>

#include "liftmap/autgroup.hpp"
#include "liftmap/cycles.hpp"
#include "liftmap/lift.hpp"
#include "liftmap/model.hpp"

// Deterministic fixtures shared by the unit and acceptance tests.
namespace liftmap::testing {

inline std::vector<std::pair<int, int>> path_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return e;
}

inline std::vector<std::pair<int, int>> cycle_edges(int n) {
  auto e = path_edges(n);
  if (n >= 3) e.push_back({0, n - 1});
  return e;
}

inline std::vector<std::pair<int, int>> complete_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.push_back({u, v});
  return e;
}

inline std::vector<std::pair<int, int>> star_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v < n; ++v) e.push_back({0, v});
  return e;
}

inline std::vector<std::pair<int, int>> bipartite_edges(int a, int b) {
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < a; ++u)
    for (int v = 0; v < b; ++v) e.push_back({u, a + v});
  return e;
}

inline std::vector<std::pair<int, int>> random_edges(std::mt19937& rng, int n, double p) {
  std::vector<std::pair<int, int>> e;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng) < p) e.push_back({u, v});
  return e;
}

inline std::vector<std::pair<int, int>> random_tree_edges(std::mt19937& rng, int n) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(rng() % v);
    e.push_back({u, v});
  }
  return e;
}

// Tied model: every node carries one of `node_kinds` unary templates, every
// edge one of `edge_kinds` pairwise templates; features of one template share
// a tie cell. Tables are sampled irreducible.
inline Model tied_model(std::mt19937& rng, int n, std::vector<std::pair<int, int>> edges,
                        int node_kinds, int edge_kinds, bool symmetric_tables) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> wdist(-2.0, 2.0);

  std::vector<std::vector<double>> utab(node_kinds), ptab(edge_kinds);
  std::vector<double> uw(node_kinds), pw(edge_kinds);
  for (int k = 0; k < node_kinds; ++k) {
    double a = unit(rng), b = unit(rng);
    while (std::fabs(a - b) < 1e-2) b = unit(rng);
    utab[k] = {a, b};
    uw[k] = wdist(rng);
  }
  for (int k = 0; k < edge_kinds; ++k) {
    while (true) {
      double t00 = unit(rng), t01 = unit(rng), t10 = unit(rng), t11 = unit(rng);
      if (symmetric_tables) t10 = t01;
      bool rows = std::fabs(t00 - t10) > 1e-2 || std::fabs(t01 - t11) > 1e-2;
      bool cols = std::fabs(t00 - t01) > 1e-2 || std::fabs(t10 - t11) > 1e-2;
      if (rows && cols) {
        ptab[k] = {t00, t01, t10, t11};
        break;
      }
    }
    pw[k] = wdist(rng);
  }

  std::vector<Feature> features;
  for (int v = 0; v < n; ++v) {
    int k = node_kinds == 1 ? 0 : static_cast<int>(rng() % node_kinds);
    Feature f;
    f.scope = {v};
    f.table = utab[k];
    f.weight = uw[k];
    f.tie_cell = k;
    features.push_back(std::move(f));
  }
  for (auto [u, v] : edges) {
    int k = edge_kinds == 1 ? 0 : static_cast<int>(rng() % edge_kinds);
    Feature f;
    f.scope = {u, v};
    f.table = ptab[k];
    f.weight = pw[k];
    f.tie_cell = node_kinds + k;
    features.push_back(std::move(f));
  }
  return Model::make(n, std::move(features));
}

// Structured instance with few templates, so nontrivial symmetry is common.
inline Model random_tied_model(std::mt19937& rng, int n) {
  std::vector<std::pair<int, int>> edges;
  switch (rng() % 5) {
    case 0: edges = cycle_edges(n); break;
    case 1: edges = complete_edges(n); break;
    case 2: edges = star_edges(n); break;
    case 3: edges = bipartite_edges(n / 2, n - n / 2); break;
    default: edges = random_edges(rng, n, 0.4); break;
  }
  int nk = 1 + static_cast<int>(rng() % 2);
  int ek = 1 + static_cast<int>(rng() % 2);
  return tied_model(rng, n, std::move(edges), nk, ek, rng() % 2 == 0);
}

// Three agree-scoring edges with weight -1: any assignment keeps at least one
// agreement, so the exact optimum is -1 while the local relaxation reaches 0.
inline Model frustrated_triangle() {
  std::vector<Feature> fs;
  for (auto [u, v] : complete_edges(3)) {
    Feature f;
    f.scope = {u, v};
    f.table = {1, 0, 0, 1};
    f.weight = -1;
    f.tie_cell = 0;
    fs.push_back(std::move(f));
  }
  return Model::make(3, std::move(fs));
}

inline Model frustrated_cycle(int n) {
  std::vector<Feature> fs;
  for (auto [u, v] : cycle_edges(n)) {
    Feature f;
    f.scope = {u, v};
    f.table = {1, 0, 0, 1};
    f.weight = -1;
    f.tie_cell = 0;
    fs.push_back(std::move(f));
  }
  return Model::make(n, std::move(fs));
}

// Triangle with one anchored node: a unary reward on node 0 plus tied
// agreement rewards. Symmetry is exactly the swap of nodes 1 and 2.
inline Model anchored_triangle() {
  std::vector<Feature> fs;
  Feature u;
  u.scope = {0};
  u.table = {0, 1};
  u.weight = 1;
  u.tie_cell = 0;
  fs.push_back(std::move(u));
  for (auto [a, b] : complete_edges(3)) {
    Feature f;
    f.scope = {a, b};
    f.table = {1, 0, 0, 1};
    f.weight = 0.5;
    f.tie_cell = 1;
    fs.push_back(std::move(f));
  }
  return Model::make(3, std::move(fs));
}

inline std::string semi_transitive_mln(int domain) {
  std::string s;
  s += "predicate pred/2\n";
  s += "predicate obs/2\n";
  s += "domain " + std::to_string(domain) + "\n";
  s += "-100: x != y, x != z, y != z => pred(x,y) <=> pred(y,z)\n";
  s += "0.1: x != y, obs(x,y) => pred(x,y)\n";
  s += "evidence obs(A,B)\n";
  return s;
}

// A point of the ground LOCAL polytope: node marginals first, then one
// consistent joint per edge (p11 drawn from its feasible interval).
inline PseudoMarginal random_local_point(std::mt19937& rng, const Graph& g) {
  std::uniform_real_distribution<double> mdist(0.15, 0.85);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int n = g.num_nodes;
  PseudoMarginal tau(2 * n + 4 * g.num_edges(), 0.0);
  std::vector<double> mu(n);
  for (int v = 0; v < n; ++v) {
    mu[v] = mdist(rng);
    tau[2 * v + 0] = 1.0 - mu[v];
    tau[2 * v + 1] = mu[v];
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    double lo = std::max(0.0, mu[u] + mu[v] - 1.0);
    double hi = std::min(mu[u], mu[v]);
    double p11 = lo + (hi - lo) * unit(rng);
    int b = 2 * n + 4 * e;
    tau[b + 1] = p11;
    tau[b + 2] = mu[v] - p11;          // u=0, v=1
    tau[b + 3] = mu[u] - p11;          // u=1, v=0
    tau[b + 0] = 1.0 - mu[u] - mu[v] + p11;
  }
  return tau;
}

inline Separator ground_separator(const Graph& g, const LiftedGraph& full) {
  Separator sep;
  for (const auto& orbit : full.nodes)
    sep.views.push_back(make_fixed_view(g, full, OrbitPartition::discrete(g.num_nodes),
                                        OrbitPartition::discrete(g.num_edges()),
                                        OrbitPartition::discrete(2 * g.num_edges()), orbit.rep));
  return sep;
}

inline Separator graph_separator(const Model& m, const Graph& g, const LiftedGraph& full) {
  Separator sep;
  for (const auto& orbit : full.nodes) {
    SymmetrySummary s = fixed_node_symmetry(m, g, orbit.rep);
    sep.views.push_back(
        make_fixed_view(g, full, s.var_orbits, s.edge_orbits, s.arc_orbits, orbit.rep));
  }
  return sep;
}

struct LiftedProblem {
  LiftedGraph lg;
  LiftedParams th;
};

inline LiftedProblem lift_by(const Model& m, const Graph& g, const OrbitPartition& vars,
                             const OrbitPartition& edges, const OrbitPartition& arcs) {
  LiftedProblem p{build_lifted_graph(g, vars, edges, arcs), {}};
  p.th = lift_parameters(to_overcomplete(m, g), g, p.lg);
  return p;
}

inline LiftedProblem lift_ground_problem(const Model& m, const Graph& g) {
  return lift_by(m, g, OrbitPartition::discrete(g.num_nodes),
                 OrbitPartition::discrete(g.num_edges()),
                 OrbitPartition::discrete(2 * g.num_edges()));
}

}  // namespace liftmap::testing
