#include "liftmap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liftmap::oracle {

ExactMap exact_map(const Model& m, int max_vars) {
  if (m.num_vars > max_vars) throw BudgetError("exact_map: too many variables");
  ExactMap out;
  out.value = -std::numeric_limits<double>::infinity();
  uint32_t total = uint32_t{1} << m.num_vars;
  for (uint32_t bits = 0; bits < total; ++bits) {
    double s = m.score_bits(bits);
    if (s > out.value) {
      out.value = s;
      out.argmax.clear();
    }
    if (s == out.value && out.argmax.size() < 64)
      out.argmax.push_back(config_from_bits(bits, m.num_vars));
  }
  return out;
}

namespace {

void extend_mapping(const ColoredGraph& g, Permutation& p, std::vector<char>& used, int v,
                    std::vector<Permutation>& found) {
  int n = g.num_vertices;
  if (v == n) {
    found.push_back(p);
    return;
  }
  for (int w = 0; w < n; ++w) {
    if (used[w] || g.vertex_colors[w] != g.vertex_colors[v]) continue;
    bool ok = true;
    // neighbors among already-mapped vertices must match with equal edge color
    for (auto [nb, color] : g.adj[v]) {
      if (nb >= v) continue;
      bool hit = false;
      for (auto [wb, wcolor] : g.adj[w])
        if (wb == p.image[nb] && wcolor == color) {
          hit = true;
          break;
        }
      if (!hit) {
        ok = false;
        break;
      }
    }
    if (ok) {
      // degree must match, so the reverse inclusion follows from counting
      // only if degrees toward mapped vertices agree; check it directly
      int dv = 0, dw = 0;
      for (auto [nb, color] : g.adj[v])
        if (nb < v) ++dv;
      for (auto [wb, wcolor] : g.adj[w])
        if (used[wb]) ++dw;
      if (dv != dw) ok = false;
    }
    if (!ok) continue;
    used[w] = 1;
    p.image[v] = w;
    extend_mapping(g, p, used, v + 1, found);
    used[w] = 0;
  }
}

}  // namespace

BruteGroup brute_automorphisms(const ColoredGraph& g, int max_vertices) {
  if (g.num_vertices > max_vertices) throw BudgetError("brute_automorphisms: graph too large");
  BruteGroup out;
  Permutation p = Permutation::identity(g.num_vertices);
  std::vector<char> used(g.num_vertices, 0);
  extend_mapping(g, p, used, 0, out.elements);
  for (const auto& e : out.elements)
    if (!g.is_automorphism(e)) throw Error("brute_automorphisms: search produced a non-automorphism");
  out.order = out.elements.size();
  UnionFind uf(g.num_vertices);
  for (const auto& e : out.elements)
    for (int v = 0; v < g.num_vertices; ++v) uf.unite(v, e(v));
  out.orbits = OrbitPartition::from_union_find(uf, g.num_vertices);
  return out;
}

std::vector<ConfigOrbit> config_orbit_centroids(const Model& m,
                                                const std::vector<Permutation>& var_perms,
                                                int max_vars) {
  if (m.num_vars > max_vars) throw BudgetError("config_orbit_centroids: too many variables");
  uint32_t total = uint32_t{1} << m.num_vars;
  UnionFind uf(total);
  for (const auto& p : var_perms) {
    if (p.size() != m.num_vars)
      throw ValidationError("config_orbit_centroids: permutation domain mismatch");
    for (uint32_t bits = 0; bits < total; ++bits) {
      uint32_t img = 0;
      for (int v = 0; v < m.num_vars; ++v) img |= ((bits >> v) & 1u) << p(v);
      uf.unite(bits, img);
    }
  }
  OrbitPartition orbits = OrbitPartition::from_union_find(uf, total);
  std::vector<ConfigOrbit> out;
  for (const auto& cell : orbits.cells) {
    ConfigOrbit o;
    o.size = cell.size();
    o.centroid.assign(m.num_features(), 0.0);
    for (int bits : cell) {
      Config x = config_from_bits(bits, m.num_vars);
      for (int j = 0; j < m.num_features(); ++j) o.centroid[j] += m.features[j].eval(x);
    }
    for (double& c : o.centroid) c /= static_cast<double>(cell.size());
    out.push_back(std::move(o));
  }
  return out;
}

std::optional<BruteCut> brute_separation(const Graph& g, const std::vector<double>& tau,
                                         int max_nodes) {
  if (g.num_nodes > max_nodes) throw BudgetError("brute_separation: graph too large");
  int n = g.num_nodes;
  std::vector<double> cutv(g.num_edges()), nocutv(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    int b = 2 * n + 4 * e;
    nocutv[e] = tau[b + 0] + tau[b + 1];
    cutv[e] = tau[b + 2] + tau[b + 3];
  }

  std::optional<BruteCut> best;
  std::vector<int> path_nodes, path_edges;
  std::vector<char> on_path(n, 0);

  auto score_cycle = [&](const std::vector<int>& edges) {
    // charge each edge the cheaper side, then flip the cheapest edge if the
    // number of nocut charges came out even
    double total = 0.0;
    std::vector<uint8_t> charge(edges.size());
    int odd = 0;
    int flip = -1;
    double flip_cost = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < edges.size(); ++i) {
      int e = edges[i];
      charge[i] = nocutv[e] <= cutv[e] ? 1 : 0;
      total += charge[i] ? nocutv[e] : cutv[e];
      odd += charge[i];
      double c = std::fabs(nocutv[e] - cutv[e]);
      if (c < flip_cost) {
        flip_cost = c;
        flip = static_cast<int>(i);
      }
    }
    if (odd % 2 == 0) {
      total += flip_cost;
      charge[flip] ^= 1;
    }
    if (!best || total - 1.0 < best->slack) best = BruteCut{total - 1.0, edges, charge};
  };

  auto dfs = [&](auto&& self, int start, int v) -> void {
    for (auto [w, e] : g.adj[v]) {
      if (w == start && path_nodes.size() >= 3) {
        // canonical direction: second node smaller than last
        if (path_nodes[1] < path_nodes.back()) {
          path_edges.push_back(e);
          score_cycle(path_edges);
          path_edges.pop_back();
        }
      }
      if (w <= start || on_path[w]) continue;
      on_path[w] = 1;
      path_nodes.push_back(w);
      path_edges.push_back(e);
      self(self, start, w);
      path_edges.pop_back();
      path_nodes.pop_back();
      on_path[w] = 0;
    }
  };

  for (int s = 0; s < n; ++s) {
    std::fill(on_path.begin(), on_path.end(), 0);
    on_path[s] = 1;
    path_nodes = {s};
    path_edges.clear();
    dfs(dfs, s, s);
  }
  return best;
}

}  // namespace liftmap::oracle
