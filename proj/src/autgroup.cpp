#include "liftmap/autgroup.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace liftmap {

// ---------------------------------------------------------------- BigCount

BigCount BigCount::from(uint64_t v) {
  BigCount b;
  const uint64_t base = 1000000000000000000ull;
  while (v) {
    b.limbs.push_back(v % base);
    v /= base;
  }
  return b;
}

void BigCount::mul(uint64_t k) {
  const uint64_t base = 1000000000000000000ull;
  if (k == 0) {
    limbs.clear();
    return;
  }
  unsigned __int128 carry = 0;
  for (auto& limb : limbs) {
    unsigned __int128 cur = static_cast<unsigned __int128>(limb) * k + carry;
    limb = static_cast<uint64_t>(cur % base);
    carry = cur / base;
  }
  while (carry) {
    limbs.push_back(static_cast<uint64_t>(carry % base));
    carry /= base;
  }
}

std::string BigCount::str() const {
  if (limbs.empty()) return "0";
  std::string s = std::to_string(limbs.back());
  for (int i = static_cast<int>(limbs.size()) - 2; i >= 0; --i) {
    std::string part = std::to_string(limbs[i]);
    s += std::string(18 - part.size(), '0') + part;
  }
  return s;
}

bool BigCount::fits_u64() const {
  if (limbs.size() <= 1) return true;
  if (limbs.size() > 2) return false;
  unsigned __int128 v =
      static_cast<unsigned __int128>(limbs[1]) * 1000000000000000000ull + limbs[0];
  return v <= static_cast<unsigned __int128>(UINT64_MAX);
}

uint64_t BigCount::as_u64() const {
  if (!fits_u64()) throw Error("group order does not fit in 64 bits: " + str());
  if (limbs.empty()) return 0;
  if (limbs.size() == 1) return limbs[0];
  return limbs[1] * 1000000000000000000ull + limbs[0];
}

// ------------------------------------------------------------ ColoredGraph

void ColoredGraph::finalize() {
  if (static_cast<int>(vertex_colors.size()) != num_vertices)
    throw ValidationError("colored graph: vertex color count mismatch");
  adj.assign(num_vertices, {});
  std::unordered_map<int64_t, int> seen;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_vertices || e.v >= num_vertices || e.u == e.v)
      throw ValidationError("colored graph: bad edge endpoints");
    int a = std::min(e.u, e.v), b = std::max(e.u, e.v);
    int64_t key = static_cast<int64_t>(a) * num_vertices + b;
    if (!seen.emplace(key, e.color).second)
      throw ValidationError("colored graph: duplicate edge");
    adj[e.u].push_back({e.v, e.color});
    adj[e.v].push_back({e.u, e.color});
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
}

bool ColoredGraph::is_automorphism(const Permutation& p) const {
  if (p.size() != num_vertices) return false;
  std::vector<char> hit(num_vertices, 0);
  for (int v = 0; v < num_vertices; ++v) {
    int w = p(v);
    if (w < 0 || w >= num_vertices || hit[w]) return false;
    hit[w] = 1;
    if (vertex_colors[w] != vertex_colors[v]) return false;
  }
  std::unordered_map<int64_t, int> edge_color;
  edge_color.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    int a = std::min(e.u, e.v), b = std::max(e.u, e.v);
    edge_color[static_cast<int64_t>(a) * num_vertices + b] = e.color;
  }
  for (const Edge& e : edges) {
    int a = std::min(p(e.u), p(e.v)), b = std::max(p(e.u), p(e.v));
    auto it = edge_color.find(static_cast<int64_t>(a) * num_vertices + b);
    if (it == edge_color.end() || it->second != e.color) return false;
  }
  return true;
}

std::string to_dimacs(const ColoredGraph& g) {
  std::ostringstream out;
  out << "p " << g.num_vertices << " " << g.edges.size() << "\n";
  out << "c";
  for (int c : g.vertex_colors) out << " " << c;
  out << "\n";
  auto sorted = g.edges;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.u, a.v, a.color) < std::tie(b.u, b.v, b.color);
  });
  for (const auto& e : sorted) out << "e " << e.u << " " << e.v << " " << e.color << "\n";
  return out.str();
}

// ---------------------------------------------------------- OrbitPartition

OrbitPartition OrbitPartition::from_union_find(UnionFind& uf, int domain) {
  OrbitPartition p;
  p.rep.assign(domain, -1);
  std::vector<int> cell_of_root(domain, -1);
  for (int v = 0; v < domain; ++v) {
    int r = uf.find(v);
    if (cell_of_root[r] < 0) {
      cell_of_root[r] = static_cast<int>(p.cells.size());
      p.cells.emplace_back();
    }
    p.rep[v] = cell_of_root[r];
    p.cells[cell_of_root[r]].push_back(v);
  }
  p.sizes.resize(p.cells.size());
  for (size_t c = 0; c < p.cells.size(); ++c) p.sizes[c] = static_cast<int>(p.cells[c].size());
  return p;
}

OrbitPartition OrbitPartition::discrete(int domain) {
  UnionFind uf(domain);
  return from_union_find(uf, domain);
}

bool OrbitPartition::refines(const OrbitPartition& coarser) const {
  if (rep.size() != coarser.rep.size()) return false;
  for (const auto& cell : cells) {
    int target = coarser.rep[cell.front()];
    for (int v : cell)
      if (coarser.rep[v] != target) return false;
  }
  return true;
}

OrbitPartition orbits(const std::vector<Permutation>& gens, int domain) {
  UnionFind uf(domain);
  for (const Permutation& g : gens) {
    if (g.size() != domain) throw ValidationError("orbit computation: generator size mismatch");
    for (int v = 0; v < domain; ++v) uf.unite(v, g(v));
  }
  return OrbitPartition::from_union_find(uf, domain);
}

// ------------------------------------------------------------- refinement

namespace {

// Dense renumbering in increasing value order; label-invariant when the input
// values are label-invariant.
std::vector<int> canonicalize_dense(const std::vector<int>& colors) {
  std::vector<int> sorted = colors;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(colors.size());
  for (size_t v = 0; v < colors.size(); ++v)
    out[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), colors[v]) -
                              sorted.begin());
  return out;
}

int num_colors(const std::vector<int>& colors) {
  int k = 0;
  for (int c : colors) k = std::max(k, c + 1);
  return k;
}

}  // namespace

std::vector<int> refine_colors(const ColoredGraph& g, std::vector<int> colors) {
  if (static_cast<int>(colors.size()) != g.num_vertices)
    throw ValidationError("refine: coloring size mismatch");
  colors = canonicalize_dense(colors);
  using Signature = std::pair<int, std::vector<std::pair<int, int>>>;
  while (true) {
    int before = num_colors(colors);
    if (before == g.num_vertices) break;
    std::vector<Signature> sig(g.num_vertices);
    for (int v = 0; v < g.num_vertices; ++v) {
      sig[v].first = colors[v];
      auto& nb = sig[v].second;
      nb.reserve(g.adj[v].size());
      for (auto [w, ec] : g.adj[v]) nb.push_back({colors[w], ec});
      std::sort(nb.begin(), nb.end());
    }
    std::map<Signature, int> ids;
    for (int v = 0; v < g.num_vertices; ++v) ids.emplace(sig[v], 0);
    int next = 0;
    for (auto& [key, id] : ids) id = next++;
    std::vector<int> refined(g.num_vertices);
    for (int v = 0; v < g.num_vertices; ++v) refined[v] = ids[sig[v]];
    if (next == before) break;  // stable: signatures split nothing new
    colors = std::move(refined);
  }
  return colors;
}

// ---------------------------------------------------------------- IR search

namespace {

std::vector<std::vector<int>> color_classes(const std::vector<int>& colors) {
  std::vector<std::vector<int>> classes(num_colors(colors));
  for (size_t v = 0; v < colors.size(); ++v) classes[colors[v]].push_back(static_cast<int>(v));
  return classes;
}

// Smallest non-singleton class, ties broken by color id. -1 when discrete.
int target_cell(const std::vector<std::vector<int>>& classes) {
  int best = -1;
  for (size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].size() < 2) continue;
    if (best < 0 || classes[c].size() < classes[best].size()) best = static_cast<int>(c);
  }
  return best;
}

std::vector<int> individualize(const std::vector<int>& colors, int v) {
  std::vector<int> out(colors.size());
  for (size_t u = 0; u < colors.size(); ++u) out[u] = 2 * colors[u] + (static_cast<int>(u) == v);
  return canonicalize_dense(out);
}

// Multiset of (color, class size); equal for isomorphic colorings.
std::vector<std::pair<int, int>> shape_of(const std::vector<int>& colors) {
  std::vector<int> counts(num_colors(colors), 0);
  for (int c : colors) ++counts[c];
  std::vector<std::pair<int, int>> shape;
  shape.reserve(counts.size());
  for (size_t c = 0; c < counts.size(); ++c) shape.push_back({static_cast<int>(c), counts[c]});
  return shape;
}

struct RefPath {
  std::vector<std::vector<std::pair<int, int>>> shapes;
  std::vector<int> leaf_vertex_of_color;  // discrete leaf labeling
};

// Leftmost leaf of the subtree rooted at `colors` (always individualize the
// smallest vertex of the target cell).
RefPath leftmost_path(const ColoredGraph& g, std::vector<int> colors) {
  RefPath path;
  while (true) {
    path.shapes.push_back(shape_of(colors));
    auto classes = color_classes(colors);
    int cell = target_cell(classes);
    if (cell < 0) break;
    colors = refine_colors(g, individualize(colors, classes[cell].front()));
  }
  path.leaf_vertex_of_color.assign(colors.size(), -1);
  for (size_t v = 0; v < colors.size(); ++v) path.leaf_vertex_of_color[colors[v]] = static_cast<int>(v);
  return path;
}

// DFS for any automorphism whose leaf pairs with the reference leaf. Prunes
// branches whose refined shape diverges from the reference path.
std::optional<Permutation> search_mapping(const ColoredGraph& g, const std::vector<int>& colors,
                                          size_t depth, const RefPath& ref) {
  if (depth >= ref.shapes.size() || shape_of(colors) != ref.shapes[depth]) return std::nullopt;
  auto classes = color_classes(colors);
  int cell = target_cell(classes);
  if (cell < 0) {
    Permutation p;
    p.image.assign(g.num_vertices, -1);
    for (int u = 0; u < g.num_vertices; ++u) p.image[ref.leaf_vertex_of_color[colors[u]]] = u;
    if (g.is_automorphism(p)) return p;
    return std::nullopt;
  }
  for (int u : classes[cell]) {
    auto child = refine_colors(g, individualize(colors, u));
    if (auto p = search_mapping(g, child, depth + 1, ref)) return p;
  }
  return std::nullopt;
}

struct GroupResult {
  std::vector<Permutation> gens;
  BigCount order;
};

// Orbit-stabilizer recursion: |G| = |stab(v0)| * |orbit(v0)|, with one coset
// witness searched per candidate target-cell vertex.
GroupResult search_group(const ColoredGraph& g, const std::vector<int>& stable) {
  auto classes = color_classes(stable);
  int cell = target_cell(classes);
  if (cell < 0) return {{}, BigCount::from(1)};

  const std::vector<int>& vs = classes[cell];
  int v0 = vs.front();
  auto child0 = refine_colors(g, individualize(stable, v0));
  GroupResult sub = search_group(g, child0);

  GroupResult result;
  result.gens = std::move(sub.gens);
  UnionFind uf(g.num_vertices);
  for (const Permutation& p : result.gens)
    for (int w = 0; w < g.num_vertices; ++w) uf.unite(w, p(w));

  RefPath ref = leftmost_path(g, child0);
  for (size_t k = 1; k < vs.size(); ++k) {
    int v = vs[k];
    if (uf.same(v0, v)) continue;
    auto childv = refine_colors(g, individualize(stable, v));
    if (auto p = search_mapping(g, childv, 0, ref)) {
      for (int w = 0; w < g.num_vertices; ++w) uf.unite(w, p->image[w]);
      result.gens.push_back(std::move(*p));
    }
  }

  uint64_t orbit_size = 0;
  for (int v : vs)
    if (uf.same(v0, v)) ++orbit_size;
  result.order = sub.order;
  result.order.mul(orbit_size);
  return result;
}

}  // namespace

GeneratorSet automorphism_generators(const ColoredGraph& g) {
  GeneratorSet out;
  if (g.num_vertices == 0) {
    out.group_order = BigCount::from(1);
    return out;
  }
  auto stable = refine_colors(g, g.vertex_colors);
  GroupResult r = search_group(g, stable);
  out.generators = std::move(r.gens);
  out.group_order = r.order;
  return out;
}

// ------------------------------------------------------------ factor graph

FactorGraphEncoding build_colored_factor_graph(const Model& m, int individualize_var) {
  if (individualize_var >= m.num_vars)
    throw ValidationError("individualized variable out of range");
  FactorGraphEncoding enc;
  enc.num_vars = m.num_vars;
  enc.num_features = m.num_features();

  ColoredGraph& g = enc.graph;
  g.num_vertices = m.num_vars + m.num_features();
  g.vertex_colors.assign(g.num_vertices, 0);
  if (individualize_var >= 0) g.vertex_colors[individualize_var] = 1;

  // Factor color: one class per (table, tie cell); ids start above the
  // variable colors.
  using FactorKey = std::pair<std::vector<double>, int>;
  std::map<FactorKey, int> factor_class;
  for (int j = 0; j < m.num_features(); ++j) {
    const Feature& f = m.features[j];
    auto it = factor_class.try_emplace({f.table, f.tie_cell}, static_cast<int>(factor_class.size()))
                  .first;
    g.vertex_colors[m.num_vars + j] = 2 + it->second;
  }

  // Edge colors: 0 everywhere except argument positions of asymmetric
  // binary features (1 = first argument, 2 = second).
  for (int j = 0; j < m.num_features(); ++j) {
    const Feature& f = m.features[j];
    int fv = m.num_vars + j;
    if (f.arity() == 1) {
      g.edges.push_back({f.scope[0], fv, 0});
    } else if (f.symmetric()) {
      g.edges.push_back({f.scope[0], fv, 0});
      g.edges.push_back({f.scope[1], fv, 0});
    } else {
      g.edges.push_back({f.scope[0], fv, 1});
      g.edges.push_back({f.scope[1], fv, 2});
    }
  }
  g.finalize();
  return enc;
}

// ----------------------------------------------------------- model orbits

SymmetrySummary derived_orbits(const Model& m, const Graph& g, const GeneratorSet& gens) {
  int n = m.num_vars;
  int nf = m.num_features();
  int ne = g.num_edges();

  SymmetrySummary s;
  s.gens = gens;

  std::vector<Permutation> var_perms, feat_perms, edge_perms, arc_perms;
  for (const Permutation& p : gens.generators) {
    if (p.size() != n + nf)
      throw ValidationError("derived_orbits: generator is not on factor-graph vertices");
    Permutation pv, pf, pe, pa;
    pv.image.assign(n, -1);
    pf.image.assign(nf, -1);
    for (int v = 0; v < n; ++v) {
      if (p(v) >= n) throw ValidationError("derived_orbits: generator mixes variables and factors");
      pv.image[v] = p(v);
    }
    for (int j = 0; j < nf; ++j) pf.image[j] = p(n + j) - n;
    pe.image.assign(ne, -1);
    pa.image.assign(2 * ne, -1);
    for (int e = 0; e < ne; ++e) {
      auto [u, v] = g.edges[e];
      int mu = pv(u), mv = pv(v);
      int me = g.edge_index(mu, mv);
      if (me < 0) throw ValidationError("derived_orbits: generator does not preserve edges");
      pe.image[e] = me;
      pa.image[2 * e + 0] = 2 * me + (mu > mv ? 1 : 0);
      pa.image[2 * e + 1] = 2 * me + (mu > mv ? 0 : 1);
    }
    var_perms.push_back(std::move(pv));
    feat_perms.push_back(std::move(pf));
    edge_perms.push_back(std::move(pe));
    arc_perms.push_back(std::move(pa));
  }

  s.var_orbits = orbits(var_perms, n);
  s.feature_orbits = orbits(feat_perms, nf);
  s.edge_orbits = orbits(edge_perms, ne);
  s.arc_orbits = orbits(arc_perms, 2 * ne);
  return s;
}

SymmetrySummary model_symmetry(const Model& m, const Graph& g) {
  auto enc = build_colored_factor_graph(m);
  return derived_orbits(m, g, automorphism_generators(enc.graph));
}

SymmetrySummary fixed_node_symmetry(const Model& m, const Graph& g, int i) {
  if (i < 0 || i >= m.num_vars) throw ValidationError("fixed node out of range");
  auto enc = build_colored_factor_graph(m, i);
  return derived_orbits(m, g, automorphism_generators(enc.graph));
}

SymmetrySummary trivial_symmetry(const Model& m, const Graph& g) {
  SymmetrySummary s;
  s.gens.group_order = BigCount::from(1);
  s.var_orbits = OrbitPartition::discrete(m.num_vars);
  s.feature_orbits = OrbitPartition::discrete(m.num_features());
  s.edge_orbits = OrbitPartition::discrete(g.num_edges());
  s.arc_orbits = OrbitPartition::discrete(2 * g.num_edges());
  return s;
}

}  // namespace liftmap
