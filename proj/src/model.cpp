#include "liftmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace liftmap {

namespace {

void validate_feature(const Feature& f, int num_vars, int idx) {
  auto fail = [&](const std::string& msg) {
    throw ValidationError("feature " + std::to_string(idx) + ": " + msg);
  };
  if (f.scope.empty() || f.scope.size() > 2) fail("scope arity must be 1 or 2");
  for (int v : f.scope)
    if (v < 0 || v >= num_vars) fail("scope variable out of range");
  if (f.scope.size() == 2 && f.scope[0] >= f.scope[1]) fail("scope must be strictly ascending");
  if (f.table.size() != (1u << f.scope.size())) fail("table size must be 2^arity");
  for (double t : f.table)
    if (!std::isfinite(t)) fail("table entries must be finite");
  if (!std::isfinite(f.weight)) fail("weight must be finite");
  if (f.tie_cell < 0) fail("tie_cell must be nonnegative");
  // Reducible tables are rejected: the function must depend on every argument.
  if (f.scope.size() == 1) {
    if (f.table[0] == f.table[1]) fail("table does not depend on its argument");
  } else {
    if (f.table[0] == f.table[2] && f.table[1] == f.table[3])
      fail("table does not depend on first argument");
    if (f.table[0] == f.table[1] && f.table[2] == f.table[3])
      fail("table does not depend on second argument");
  }
}

}  // namespace

Model Model::make(int num_vars, std::vector<Feature> features) {
  if (num_vars < 0) throw ValidationError("num_vars must be nonnegative");
  for (size_t j = 0; j < features.size(); ++j)
    validate_feature(features[j], num_vars, static_cast<int>(j));

  // Renumber tie cells densely by first appearance and check weight agreement.
  std::map<int, int> dense;
  std::vector<std::vector<int>> cells;
  for (size_t j = 0; j < features.size(); ++j) {
    auto [it, fresh] = dense.try_emplace(features[j].tie_cell, static_cast<int>(cells.size()));
    if (fresh) cells.emplace_back();
    int cell = it->second;
    if (!cells[cell].empty()) {
      int first = cells[cell].front();
      if (features[first].weight != features[j].weight)
        throw ValidationError("tie cell " + std::to_string(cell) +
                              " mixes unequal weights");
    }
    features[j].tie_cell = cell;
    cells[cell].push_back(static_cast<int>(j));
  }

  Model m;
  m.num_vars = num_vars;
  m.features = std::move(features);
  m.tie_cells = std::move(cells);
  return m;
}

double Model::score(const Config& x) const {
  if (static_cast<int>(x.size()) != num_vars)
    throw ValidationError("configuration length mismatch");
  double s = 0.0;
  for (const Feature& f : features) s += f.weight * f.eval(x);
  return s;
}

double Model::score_bits(uint32_t bits) const {
  double s = 0.0;
  for (const Feature& f : features) {
    if (f.scope.size() == 1) {
      s += f.weight * f.table[(bits >> f.scope[0]) & 1u];
    } else {
      unsigned t0 = (bits >> f.scope[0]) & 1u;
      unsigned t1 = (bits >> f.scope[1]) & 1u;
      s += f.weight * f.table[2 * t0 + t1];
    }
  }
  return s;
}

Graph Graph::from_edges(int num_nodes, std::vector<std::pair<int, int>> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.num_nodes = num_nodes;
  g.edges = std::move(edges);
  g.adj.assign(num_nodes, {});
  for (size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    if (u < 0 || v >= num_nodes || u >= v)
      throw ValidationError("bad edge in graph construction");
    g.adj[u].push_back({v, static_cast<int>(e)});
    g.adj[v].push_back({u, static_cast<int>(e)});
  }
  return g;
}

int Graph::edge_index(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
  if (it == edges.end() || *it != std::make_pair(u, v)) return -1;
  return static_cast<int>(it - edges.begin());
}

Graph graph_structure(const Model& m) {
  std::vector<std::pair<int, int>> edges;
  for (const Feature& f : m.features)
    if (f.arity() == 2) edges.push_back({f.scope[0], f.scope[1]});
  return Graph::from_edges(m.num_vars, std::move(edges));
}

OvercompleteParams to_overcomplete(const Model& m, const Graph& g) {
  OvercompleteParams p;
  p.node.assign(m.num_vars, {0.0, 0.0});
  p.edge.assign(g.edges.size(), {0.0, 0.0, 0.0, 0.0});
  for (const Feature& f : m.features) {
    if (f.arity() == 1) {
      for (int t = 0; t < 2; ++t) p.node[f.scope[0]][t] += f.weight * f.table[t];
    } else {
      int e = g.edge_index(f.scope[0], f.scope[1]);
      for (int k = 0; k < 4; ++k) p.edge[e][k] += f.weight * f.table[k];
    }
  }
  return p;
}

double overcomplete_score(const OvercompleteParams& p, const Graph& g, const Config& x) {
  double s = 0.0;
  for (size_t v = 0; v < p.node.size(); ++v) s += p.node[v][x[v]];
  for (size_t e = 0; e < p.edge.size(); ++e) {
    auto [u, v] = g.edges[e];
    s += p.edge[e][2 * x[u] + x[v]];
  }
  return s;
}

}  // namespace liftmap
