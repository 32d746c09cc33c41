#pragma once

#include "liftmap/model.hpp"

namespace liftmap {

struct Permutation {
  std::vector<int> image;  // image[v] = where v maps

  static Permutation identity(int n) {
    Permutation p;
    p.image.resize(n);
    for (int i = 0; i < n; ++i) p.image[i] = i;
    return p;
  }
  int size() const { return static_cast<int>(image.size()); }
  int operator()(int v) const { return image[v]; }
  bool is_identity() const {
    for (int i = 0; i < size(); ++i)
      if (image[i] != i) return false;
    return true;
  }
  Permutation inverse() const {
    Permutation p;
    p.image.resize(image.size());
    for (int i = 0; i < size(); ++i) p.image[image[i]] = i;
    return p;
  }
  bool operator==(const Permutation& o) const { return image == o.image; }
};

// Unsigned big integer, only needs multiply-by-small; group orders can
// exceed 64 bits on large symmetric instances.
struct BigCount {
  std::vector<uint64_t> limbs;  // little endian, base 10^18; empty = 0

  static BigCount from(uint64_t v);
  void mul(uint64_t k);
  std::string str() const;
  bool fits_u64() const;
  uint64_t as_u64() const;  // throws if not fits
  bool operator==(const BigCount& o) const { return limbs == o.limbs; }
};

// Vertex- and edge-colored undirected simple graph.
struct ColoredGraph {
  struct Edge {
    int u, v, color;
  };
  int num_vertices = 0;
  std::vector<int> vertex_colors;
  std::vector<Edge> edges;
  std::vector<std::vector<std::pair<int, int>>> adj;  // vertex -> (neighbor, edge color)

  void finalize();  // builds adjacency, validates
  bool is_automorphism(const Permutation& p) const;
};

// Debug dump: "p V E", one "c ..." line with vertex colors, "e u v color" lines.
std::string to_dimacs(const ColoredGraph& g);

struct GeneratorSet {
  std::vector<Permutation> generators;
  BigCount group_order;
};

// Partition into orbit cells. Cells are sorted internally and ordered by
// smallest member; rep maps element -> cell id (the orbit mapping function).
struct OrbitPartition {
  std::vector<std::vector<int>> cells;
  std::vector<int> rep;
  std::vector<int> sizes;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int representative(int cell) const { return cells[cell].front(); }
  static OrbitPartition from_union_find(UnionFind& uf, int domain);
  static OrbitPartition discrete(int domain);
  // True if every cell of this partition lies inside one cell of `coarser`.
  bool refines(const OrbitPartition& coarser) const;
};

// Coarsest equitable coloring refining `initial` (signature: own color plus
// multiset of (neighbor color, edge color)). New color ids are assigned in a
// label-invariant order.
std::vector<int> refine_colors(const ColoredGraph& g, std::vector<int> initial);

// Individualization-refinement search. Generators are valid automorphisms;
// group order comes from the orbit-stabilizer recursion.
GeneratorSet automorphism_generators(const ColoredGraph& g);

OrbitPartition orbits(const std::vector<Permutation>& gens, int domain);

// Bipartite encoding: vertices [0, num_vars) are variables, num_vars + j is
// feature j. Factor colors split by (table, tie cell); edges are colored by
// argument position unless the feature function is symmetric.
struct FactorGraphEncoding {
  ColoredGraph graph;
  int num_vars = 0;
  int num_features = 0;
};

FactorGraphEncoding build_colored_factor_graph(const Model& m, int individualize_var = -1);

// Orbit partitions of the model objects induced by factor-graph generators.
// Arc ids: 2*e + 0 is (u,v) of edge e = {u<v}, 2*e + 1 is (v,u).
struct SymmetrySummary {
  GeneratorSet gens;  // on factor-graph vertices
  OrbitPartition var_orbits;
  OrbitPartition feature_orbits;
  OrbitPartition edge_orbits;
  OrbitPartition arc_orbits;
};

SymmetrySummary derived_orbits(const Model& m, const Graph& g, const GeneratorSet& gens);
SymmetrySummary model_symmetry(const Model& m, const Graph& g);
// Same, for the stabilizer of variable i (individualized in the factor graph).
SymmetrySummary fixed_node_symmetry(const Model& m, const Graph& g, int i);
// Identity group (ground baseline).
SymmetrySummary trivial_symmetry(const Model& m, const Graph& g);

}  // namespace liftmap
