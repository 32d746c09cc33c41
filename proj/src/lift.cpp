#include "liftmap/lift.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace liftmap {

namespace {
constexpr double kOrbitTol = 1e-9;
}

LiftedGraph build_lifted_graph(const Graph& g, const OrbitPartition& node_orbits,
                               const OrbitPartition& edge_orbits,
                               const OrbitPartition& arc_orbits) {
  if (static_cast<int>(node_orbits.rep.size()) != g.num_nodes ||
      static_cast<int>(edge_orbits.rep.size()) != g.num_edges() ||
      static_cast<int>(arc_orbits.rep.size()) != 2 * g.num_edges())
    throw ValidationError("build_lifted_graph: partition domain mismatch");

  LiftedGraph lg;
  lg.node_orbit_of = node_orbits.rep;
  lg.edge_orbit_of = edge_orbits.rep;
  lg.arc_slot_of.assign(2 * g.num_edges(), -1);

  for (const auto& cell : node_orbits.cells) {
    LiftedGraph::NodeOrbit o;
    o.members = cell;
    o.rep = cell.front();
    o.size = static_cast<int>(cell.size());
    lg.nodes.push_back(std::move(o));
  }

  for (const auto& cell : edge_orbits.cells) {
    LiftedGraph::EdgeOrbit o;
    o.members = cell;
    o.rep_edge = cell.front();
    o.size = static_cast<int>(cell.size());
    auto [u, v] = g.edges[o.rep_edge];
    o.rep_u = u;
    o.rep_v = v;
    o.orbit_u = node_orbits.rep[u];
    o.orbit_v = node_orbits.rep[v];
    int slot0_orbit = arc_orbits.rep[2 * o.rep_edge + 0];
    int slot1_orbit = arc_orbits.rep[2 * o.rep_edge + 1];
    o.arc_merged = slot0_orbit == slot1_orbit;
    for (int e : cell) {
      auto [a, b] = g.edges[e];
      // endpoints must fall into the same orbit pair as the representative
      int oa = node_orbits.rep[a], ob = node_orbits.rep[b];
      if (!((oa == o.orbit_u && ob == o.orbit_v) || (oa == o.orbit_v && ob == o.orbit_u)))
        throw ValidationError("build_lifted_graph: edge orbit endpoints inconsistent");
      for (int dir = 0; dir < 2; ++dir) {
        int cellid = arc_orbits.rep[2 * e + dir];
        if (cellid != slot0_orbit && cellid != slot1_orbit)
          throw ValidationError("build_lifted_graph: arc orbit inconsistent with edge orbit");
        lg.arc_slot_of[2 * e + dir] = o.arc_merged ? 0 : (cellid == slot0_orbit ? 0 : 1);
      }
    }
    lg.edges.push_back(std::move(o));
  }
  return lg;
}

LiftedGraph trivial_lifted_graph(const Graph& g) {
  return build_lifted_graph(g, OrbitPartition::discrete(g.num_nodes),
                            OrbitPartition::discrete(g.num_edges()),
                            OrbitPartition::discrete(2 * g.num_edges()));
}

LiftedParams lift_parameters(const OvercompleteParams& theta, const Graph& g,
                             const LiftedGraph& lg) {
  if (theta.node.size() != static_cast<size_t>(g.num_nodes) ||
      theta.edge.size() != static_cast<size_t>(g.num_edges()))
    throw ValidationError("lift_parameters: parameter dimensions mismatch");

  auto close = [](double a, double b) { return std::fabs(a - b) <= kOrbitTol; };

  LiftedParams out;
  for (const auto& o : lg.nodes) {
    const auto& r = theta.node[o.rep];
    for (int v : o.members)
      if (!close(theta.node[v][0], r[0]) || !close(theta.node[v][1], r[1]))
        throw ValidationError("lift_parameters: node parameters not orbit-constant");
    out.node.push_back({o.size * r[0], o.size * r[1]});
  }

  for (const auto& o : lg.edges) {
    const auto& r = theta.edge[o.rep_edge];
    double slot_val[2] = {r[1], r[2]};  // rep 01 is slot 0, rep 10 is slot 1
    if (o.arc_merged && !close(r[1], r[2]))
      throw ValidationError("lift_parameters: merged arcs with unequal 01/10 parameters");
    for (int e : o.members) {
      const auto& t = theta.edge[e];
      if (!close(t[0], r[0]) || !close(t[3], r[3]))
        throw ValidationError("lift_parameters: edge parameters not orbit-constant");
      double want01 = slot_val[lg.arc_slot_of[2 * e + 0]];
      double want10 = slot_val[lg.arc_slot_of[2 * e + 1]];
      if (!close(t[1], want01) || !close(t[2], want10))
        throw ValidationError("lift_parameters: arc parameters not orbit-constant");
    }
    LiftedParams::EdgeTerms lt;
    lt.same00 = o.size * r[0];
    lt.same11 = o.size * r[3];
    if (o.arc_merged) {
      lt.arc01[0] = 2.0 * o.size * r[1];
      lt.arc01[1] = 0;
    } else {
      lt.arc01[0] = o.size * r[1];
      lt.arc01[1] = o.size * r[2];
    }
    out.edge.push_back(lt);
  }
  return out;
}

LiftedVarLayout LiftedVarLayout::make(const LiftedGraph& lg) {
  LiftedVarLayout lay;
  lay.num_node_orbits = lg.num_node_orbits();
  int next = 2 * lg.num_node_orbits();
  for (const auto& o : lg.edges) {
    lay.edge_base.push_back(next);
    lay.merged.push_back(o.arc_merged ? 1 : 0);
    next += o.arc_merged ? 3 : 4;
  }
  lay.total = next;
  return lay;
}

namespace {

LinearProgram::Row normalize_row(std::vector<std::pair<int, double>> terms, double rhs) {
  std::sort(terms.begin(), terms.end());
  LinearProgram::Row row;
  row.rhs = rhs;
  for (auto [var, coef] : terms) {
    if (!row.terms.empty() && row.terms.back().first == var)
      row.terms.back().second += coef;
    else
      row.terms.push_back({var, coef});
  }
  std::erase_if(row.terms, [](const auto& t) { return t.second == 0.0; });
  return row;
}

void init_bounds(LinearProgram& lp, int n) {
  lp.objective.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, 1.0);
  lp.bounds_implied = true;
}

}  // namespace

LinearProgram local_constraints(const Graph& g) {
  LinearProgram lp;
  int n = g.num_nodes;
  init_bounds(lp, 2 * n + 4 * g.num_edges());
  lp.var_names.resize(lp.num_vars());
  for (int v = 0; v < n; ++v)
    for (int t = 0; t < 2; ++t) lp.var_names[2 * v + t] = "n" + std::to_string(v) + "_" + std::to_string(t);
  static const char* kPairTag[4] = {"00", "11", "01", "10"};
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    for (int k = 0; k < 4; ++k)
      lp.var_names[2 * n + 4 * e + k] =
          "e" + std::to_string(u) + "_" + std::to_string(v) + "_" + kPairTag[k];
  }

  for (int v = 0; v < n; ++v)
    lp.equalities.push_back(normalize_row({{2 * v, 1.0}, {2 * v + 1, 1.0}}, 1.0));
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    int b = 2 * n + 4 * e;
    int p00 = b, p11 = b + 1, p01 = b + 2, p10 = b + 3;
    lp.equalities.push_back(normalize_row({{p00, 1.0}, {p01, 1.0}, {2 * u, -1.0}}, 0.0));
    lp.equalities.push_back(normalize_row({{p00, 1.0}, {p10, 1.0}, {2 * v, -1.0}}, 0.0));
    lp.equalities.push_back(normalize_row({{p11, 1.0}, {p01, 1.0}, {2 * v + 1, -1.0}}, 0.0));
    lp.equalities.push_back(normalize_row({{p11, 1.0}, {p10, 1.0}, {2 * u + 1, -1.0}}, 0.0));
  }
  return lp;
}

LinearProgram lifted_local_constraints(const LiftedGraph& lg) {
  LinearProgram lp;
  LiftedVarLayout lay = LiftedVarLayout::make(lg);
  init_bounds(lp, lay.total);
  lp.var_names.resize(lay.total);
  for (int w = 0; w < lg.num_node_orbits(); ++w)
    for (int t = 0; t < 2; ++t)
      lp.var_names[lay.node_var(w, t)] = "N" + std::to_string(w) + "_" + std::to_string(t);
  for (int e = 0; e < lg.num_edge_orbits(); ++e) {
    lp.var_names[lay.pair00(e)] = "E" + std::to_string(e) + "_00";
    lp.var_names[lay.pair11(e)] = "E" + std::to_string(e) + "_11";
    lp.var_names[lay.arc_var(e, 0)] = "E" + std::to_string(e) + "_01";
    if (!lg.edges[e].arc_merged) lp.var_names[lay.arc_var(e, 1)] = "E" + std::to_string(e) + "_10";
  }

  for (int w = 0; w < lg.num_node_orbits(); ++w)
    lp.equalities.push_back(normalize_row({{lay.node_var(w, 0), 1.0}, {lay.node_var(w, 1), 1.0}}, 1.0));

  std::set<std::pair<std::vector<std::pair<int, double>>, double>> seen;
  auto push_unique = [&](LinearProgram::Row row) {
    if (seen.insert({row.terms, row.rhs}).second) lp.equalities.push_back(std::move(row));
  };
  for (int e = 0; e < lg.num_edge_orbits(); ++e) {
    const auto& o = lg.edges[e];
    int ou = o.orbit_u, ov = o.orbit_v;
    int a01 = lay.arc_var(e, 0), a10 = lay.arc_var(e, 1);  // equal when merged
    push_unique(normalize_row({{lay.pair00(e), 1.0}, {a01, 1.0}, {lay.node_var(ou, 0), -1.0}}, 0.0));
    push_unique(normalize_row({{lay.pair00(e), 1.0}, {a10, 1.0}, {lay.node_var(ov, 0), -1.0}}, 0.0));
    push_unique(normalize_row({{lay.pair11(e), 1.0}, {a01, 1.0}, {lay.node_var(ov, 1), -1.0}}, 0.0));
    push_unique(normalize_row({{lay.pair11(e), 1.0}, {a10, 1.0}, {lay.node_var(ou, 1), -1.0}}, 0.0));
  }
  return lp;
}

LinearProgram local_lp(const Graph& g, const OvercompleteParams& theta) {
  LinearProgram lp = local_constraints(g);
  int n = g.num_nodes;
  for (int v = 0; v < n; ++v)
    for (int t = 0; t < 2; ++t) lp.objective[2 * v + t] = theta.node[v][t];
  for (int e = 0; e < g.num_edges(); ++e) {
    int b = 2 * n + 4 * e;
    lp.objective[b + 0] = theta.edge[e][0];  // 00
    lp.objective[b + 1] = theta.edge[e][3];  // 11
    lp.objective[b + 2] = theta.edge[e][1];  // 01
    lp.objective[b + 3] = theta.edge[e][2];  // 10
  }
  return lp;
}

LinearProgram lifted_local_lp(const LiftedGraph& lg, const LiftedParams& theta) {
  LinearProgram lp = lifted_local_constraints(lg);
  LiftedVarLayout lay = LiftedVarLayout::make(lg);
  for (int w = 0; w < lg.num_node_orbits(); ++w)
    for (int t = 0; t < 2; ++t) lp.objective[lay.node_var(w, t)] = theta.node[w][t];
  for (int e = 0; e < lg.num_edge_orbits(); ++e) {
    lp.objective[lay.pair00(e)] = theta.edge[e].same00;
    lp.objective[lay.pair11(e)] = theta.edge[e].same11;
    lp.objective[lay.arc_var(e, 0)] = theta.edge[e].arc01[0];
    if (!lg.edges[e].arc_merged) lp.objective[lay.arc_var(e, 1)] = theta.edge[e].arc01[1];
  }
  return lp;
}

PseudoMarginal expand(const PseudoMarginal& lifted, const LiftedGraph& lg, const Graph& g) {
  LiftedVarLayout lay = LiftedVarLayout::make(lg);
  if (static_cast<int>(lifted.size()) != lay.total)
    throw ValidationError("expand: lifted point has wrong dimension");
  int n = g.num_nodes;
  PseudoMarginal out(2 * n + 4 * g.num_edges(), 0.0);
  for (int v = 0; v < n; ++v)
    for (int t = 0; t < 2; ++t) out[2 * v + t] = lifted[lay.node_var(lg.node_orbit_of[v], t)];
  for (int e = 0; e < g.num_edges(); ++e) {
    int o = lg.edge_orbit_of[e];
    int b = 2 * n + 4 * e;
    out[b + 0] = lifted[lay.pair00(o)];
    out[b + 1] = lifted[lay.pair11(o)];
    out[b + 2] = lifted[lay.arc_var(o, lg.arc_slot_of[2 * e + 0])];
    out[b + 3] = lifted[lay.arc_var(o, lg.arc_slot_of[2 * e + 1])];
  }
  return out;
}

double max_constraint_violation(const LinearProgram& lp, const PseudoMarginal& x) {
  if (x.size() != static_cast<size_t>(lp.num_vars()))
    throw ValidationError("constraint check: dimension mismatch");
  double worst = 0.0;
  auto eval = [&](const LinearProgram::Row& row) {
    double s = 0.0;
    for (auto [var, coef] : row.terms) s += coef * x[var];
    return s;
  };
  for (const auto& row : lp.equalities) worst = std::max(worst, std::fabs(eval(row) - row.rhs));
  for (const auto& row : lp.geq) worst = std::max(worst, row.rhs - eval(row));
  for (int v = 0; v < lp.num_vars(); ++v) {
    worst = std::max(worst, lp.lower[v] - x[v]);
    worst = std::max(worst, x[v] - lp.upper[v]);
  }
  return worst;
}

double objective_value(const LinearProgram& lp, const PseudoMarginal& x) {
  double s = 0.0;
  for (int v = 0; v < lp.num_vars(); ++v) s += lp.objective[v] * x[v];
  return s;
}

PseudoMarginal integral_point(const LiftedGraph& lg, const LiftedVarLayout& lay,
                              const std::vector<int>& states) {
  if (static_cast<int>(states.size()) != lg.num_node_orbits())
    throw ValidationError("integral_point: one state per node orbit required");
  PseudoMarginal x(lay.total, 0.0);
  for (int w = 0; w < lg.num_node_orbits(); ++w) x[lay.node_var(w, states[w])] = 1.0;
  for (int e = 0; e < lg.num_edge_orbits(); ++e) {
    const auto& o = lg.edges[e];
    int su = states[o.orbit_u], sv = states[o.orbit_v];
    if (su == 0 && sv == 0)
      x[lay.pair00(e)] = 1.0;
    else if (su == 1 && sv == 1)
      x[lay.pair11(e)] = 1.0;
    else if (su == 0 && sv == 1)
      x[lay.arc_var(e, 0)] = 1.0;
    else
      x[lay.arc_var(e, 1)] = 1.0;
  }
  return x;
}

std::string lp_to_text(const LinearProgram& lp) {
  std::ostringstream out;
  out << std::setprecision(17);
  auto write_terms = [&](const std::vector<std::pair<int, double>>& terms) {
    bool first = true;
    for (auto [var, coef] : terms) {
      if (coef == 0.0) continue;
      if (first) {
        out << coef << " " << lp.var_names[var];
        first = false;
      } else {
        out << (coef < 0 ? " - " : " + ") << std::fabs(coef) << " " << lp.var_names[var];
      }
    }
    if (first) out << "0";
  };
  out << "Maximize\n obj: ";
  {
    std::vector<std::pair<int, double>> terms;
    for (int v = 0; v < lp.num_vars(); ++v)
      if (lp.objective[v] != 0.0) terms.push_back({v, lp.objective[v]});
    write_terms(terms);
  }
  out << "\nSubject To\n";
  for (size_t i = 0; i < lp.equalities.size(); ++i) {
    out << " eq" << i << ": ";
    write_terms(lp.equalities[i].terms);
    out << " = " << lp.equalities[i].rhs << "\n";
  }
  for (size_t i = 0; i < lp.geq.size(); ++i) {
    out << " ge" << i << ": ";
    write_terms(lp.geq[i].terms);
    out << " >= " << lp.geq[i].rhs << "\n";
  }
  out << "Bounds\n";
  for (int v = 0; v < lp.num_vars(); ++v)
    out << " " << lp.lower[v] << " <= " << lp.var_names[v] << " <= " << lp.upper[v] << "\n";
  out << "End\n";
  return out.str();
}

}  // namespace liftmap
