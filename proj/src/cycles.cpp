#include "liftmap/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace liftmap {

namespace {
constexpr double kPathTol = 1e-9;  // paths of weight >= 1 - kPathTol are not violated
constexpr double kNegTol = 1e-9;   // pair mass below -kNegTol triggers the clamp warning
}

double nocut_value(const LiftedVarLayout& lay, const PseudoMarginal& tau, int e) {
  return tau[lay.pair00(e)] + tau[lay.pair11(e)];
}

double cut_value(const LiftedGraph& lg, const LiftedVarLayout& lay, const PseudoMarginal& tau,
                 int e) {
  if (lg.edges[e].arc_merged) return 2.0 * tau[lay.arc_var(e, 0)];
  return tau[lay.arc_var(e, 0)] + tau[lay.arc_var(e, 1)];
}

double eval_cycle_slack(const CycleCut& cut, const LiftedGraph& lg, const LiftedVarLayout& lay,
                        const PseudoMarginal& tau) {
  if (cut.edge_orbits.size() != cut.in_f.size() || cut.edge_orbits.empty())
    throw ValidationError("cycle cut: malformed walk");
  int odd = 0;
  double lhs = 0.0;
  for (size_t i = 0; i < cut.edge_orbits.size(); ++i) {
    if (cut.in_f[i]) {
      lhs += nocut_value(lay, tau, cut.edge_orbits[i]);
      ++odd;
    } else {
      lhs += cut_value(lg, lay, tau, cut.edge_orbits[i]);
    }
  }
  if (odd % 2 == 0) throw ValidationError("cycle cut: even number of uncut steps");
  return lhs - 1.0;
}

LinearProgram::Row cycle_cut_row(const CycleCut& cut, const LiftedGraph& lg,
                                 const LiftedVarLayout& lay) {
  std::vector<std::pair<int, double>> terms;
  for (size_t i = 0; i < cut.edge_orbits.size(); ++i) {
    int e = cut.edge_orbits[i];
    if (cut.in_f[i]) {
      terms.push_back({lay.pair00(e), 1.0});
      terms.push_back({lay.pair11(e), 1.0});
    } else if (lg.edges[e].arc_merged) {
      terms.push_back({lay.arc_var(e, 0), 2.0});
    } else {
      terms.push_back({lay.arc_var(e, 0), 1.0});
      terms.push_back({lay.arc_var(e, 1), 1.0});
    }
  }
  std::sort(terms.begin(), terms.end());
  LinearProgram::Row row;
  row.rhs = 1.0;
  for (auto [var, coef] : terms) {
    if (!row.terms.empty() && row.terms.back().first == var)
      row.terms.back().second += coef;
    else
      row.terms.push_back({var, coef});
  }
  return row;
}

FixedLiftedView make_fixed_view(const Graph& g, const LiftedGraph& full,
                                const OrbitPartition& node_orbits,
                                const OrbitPartition& edge_orbits,
                                const OrbitPartition& arc_orbits, int var) {
  FixedLiftedView view;
  view.fixed_var = var;
  view.local = build_lifted_graph(g, node_orbits, edge_orbits, arc_orbits);
  view.fixed_node_orbit = view.local.node_orbit_of[var];
  if (view.local.nodes[view.fixed_node_orbit].size != 1)
    throw ValidationError("fixed view: stabilizer does not fix the chosen variable");
  view.parent_edge_orbit.reserve(view.local.edges.size());
  for (const auto& o : view.local.edges) {
    int parent = full.edge_orbit_of[o.members.front()];
    for (int e : o.members)
      if (full.edge_orbit_of[e] != parent)
        throw ValidationError("fixed view: orbits do not refine the full orbits");
    view.parent_edge_orbit.push_back(parent);
  }
  return view;
}

SeparationOutcome separate_at(const FixedLiftedView& view, const LiftedGraph& full,
                              const LiftedVarLayout& lay, const PseudoMarginal& tau) {
  SeparationOutcome out;
  const LiftedGraph& loc = view.local;
  int nv = loc.num_node_orbits();

  struct Arc {
    int to;
    int local_edge;
    uint8_t cross;
    double w;
  };
  std::vector<std::vector<Arc>> adj(2 * nv);
  for (int le = 0; le < loc.num_edge_orbits(); ++le) {
    int p = loc.edges[le].orbit_u, q = loc.edges[le].orbit_v;
    int pe = view.parent_edge_orbit[le];
    double within = cut_value(full, lay, tau, pe);
    double cross = nocut_value(lay, tau, pe);
    for (double* w : {&within, &cross}) {
      if (*w < 0.0) {
        if (*w < -kNegTol) out.negative_weights = true;
        *w = 0.0;
      }
    }
    for (int c = 0; c < 2; ++c) {
      if (p != q) {
        adj[2 * p + c].push_back({2 * q + c, le, 0, within});
        adj[2 * q + c].push_back({2 * p + c, le, 0, within});
        adj[2 * q + c].push_back({2 * p + (1 - c), le, 1, cross});
      }
      adj[2 * p + c].push_back({2 * q + (1 - c), le, 1, cross});
    }
  }

  int src = 2 * view.fixed_node_orbit, dst = src + 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(2 * nv, inf);
  struct Prev {
    int vertex = -1;
    int local_edge = -1;
    uint8_t cross = 0;
  };
  std::vector<Prev> prev(2 * nv);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == dst) break;
    for (const Arc& a : adj[v]) {
      double nd = d + a.w;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        prev[a.to] = {v, a.local_edge, a.cross};
        pq.push({nd, a.to});
      }
    }
  }

  if (dist[dst] >= 1.0 - kPathTol) return out;

  CycleCut cut;
  cut.via_node_orbit = full.node_orbit_of[view.fixed_var];
  cut.slack = dist[dst] - 1.0;
  for (int v = dst; v != src;) {
    const Prev& p = prev[v];
    cut.edge_orbits.push_back(view.parent_edge_orbit[p.local_edge]);
    cut.in_f.push_back(p.cross);
    v = p.vertex;
  }
  std::reverse(cut.edge_orbits.begin(), cut.edge_orbits.end());
  std::reverse(cut.in_f.begin(), cut.in_f.end());
  out.cut = std::move(cut);
  return out;
}

SeparationOutcome separate(const Separator& sep, const LiftedGraph& full,
                           const LiftedVarLayout& lay, const PseudoMarginal& tau) {
  SeparationOutcome best;
  for (const auto& view : sep.views) {
    SeparationOutcome got = separate_at(view, full, lay, tau);
    best.negative_weights = best.negative_weights || got.negative_weights;
    if (got.cut && (!best.cut || got.cut->slack < best.cut->slack)) best.cut = std::move(got.cut);
  }
  return best;
}

CutSolveResult cutting_plane_solve(LinearProgram lp, const LiftedGraph& lg, const Separator& sep,
                                   CutSolveOptions opt) {
  CutSolveResult res;
  LiftedVarLayout lay = LiftedVarLayout::make(lg);
  LPSolution sol = lp_solve(lp);
  if (sol.status == LPStatus::optimal) {
    res.objective_trace.push_back(sol.objective);
    std::set<std::pair<std::vector<std::pair<int, double>>, double>> seen;
    for (int round = 0; round < opt.max_rounds; ++round) {
      SeparationOutcome got = separate(sep, lg, lay, sol.x);
      res.negative_weights = res.negative_weights || got.negative_weights;
      if (!got.cut || got.cut->slack >= -opt.violation_tol) {
        res.converged = true;
        break;
      }
      LinearProgram::Row row = cycle_cut_row(*got.cut, lg, lay);
      if (!seen.insert({row.terms, row.rhs}).second) {
        res.repeated_cut = true;
        break;
      }
      lp.geq.push_back(std::move(row));
      res.cuts.push_back(*got.cut);
      ++res.rounds;
      sol = lp_solve(lp);
      if (sol.status != LPStatus::optimal) break;
      res.objective_trace.push_back(sol.objective);
    }
    if (!res.converged && !res.repeated_cut && sol.status == LPStatus::optimal &&
        res.rounds == opt.max_rounds)
      res.hit_round_limit = true;
  }
  res.solution = std::move(sol);
  res.lp = std::move(lp);
  return res;
}

}  // namespace liftmap
