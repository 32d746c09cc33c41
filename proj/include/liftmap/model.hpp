#pragma once

#include <array>
#include <utility>

#include "liftmap/common.hpp"

namespace liftmap {

// Weighted feature over one or two binary variables. The table is dense,
// row-major over {0,1}^arity, and must depend on every scope variable.
struct Feature {
  std::vector<int> scope;     // ascending variable ids
  std::vector<double> table;  // arity 1: [f(0), f(1)]; arity 2: [f(00), f(01), f(10), f(11)]
  double weight = 0.0;
  int tie_cell = 0;           // parameter-tying cell id

  int arity() const { return static_cast<int>(scope.size()); }
  bool symmetric() const { return arity() == 1 || table[1] == table[2]; }
  double at(int t0) const { return table[t0]; }
  double at(int t0, int t1) const { return table[2 * t0 + t1]; }
  double eval(const Config& x) const {
    return arity() == 1 ? table[x[scope[0]]] : table[2 * x[scope[0]] + x[scope[1]]];
  }
};

struct Model {
  int num_vars = 0;
  std::vector<Feature> features;
  std::vector<std::vector<int>> tie_cells;  // partition of feature ids, cell ids dense

  // Validates scopes, tables (irreducible), and tying (equal weights per cell).
  // Tie cell ids are renumbered densely by first appearance.
  static Model make(int num_vars, std::vector<Feature> features);

  int num_features() const { return static_cast<int>(features.size()); }
  double score(const Config& x) const;
  double score_bits(uint32_t bits) const;
};

// Undirected structure graph: one node per variable, one edge per distinct
// pairwise scope (duplicates collapse).
struct Graph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;                  // u < v, sorted
  std::vector<std::vector<std::pair<int, int>>> adj;       // node -> (neighbor, edge id)

  int num_edges() const { return static_cast<int>(edges.size()); }
  int edge_index(int u, int v) const;                      // -1 if absent
  static Graph from_edges(int num_nodes, std::vector<std::pair<int, int>> edges);
};

Graph graph_structure(const Model& m);

// Overcomplete (standard) parameters: one entry per node state and per edge
// configuration. <theta_o, indicator features of x> == model score of x.
struct OvercompleteParams {
  std::vector<std::array<double, 2>> node;  // [v][t]
  std::vector<std::array<double, 4>> edge;  // [e][2*tu+tv], edge ids from Graph
};

OvercompleteParams to_overcomplete(const Model& m, const Graph& g);
double overcomplete_score(const OvercompleteParams& p, const Graph& g, const Config& x);

}  // namespace liftmap
