#include "liftmap/mplp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace liftmap {

namespace {

// Pair objective of edge orbit e at states (s, t) of (orbit_u, orbit_v). For a
// merged orbit the single arc variable carries both mixed states, but merged
// orbits are self-loops, so mixed states never occur in a decoded assignment.
double pair_coef(const LiftedGraph& lg, const LiftedParams& th, int e, int s, int t) {
  const auto& c = th.edge[e];
  if (s == 0 && t == 0) return c.same00;
  if (s == 1 && t == 1) return c.same11;
  if (s == 0) return c.arc01[0];
  return c.arc01[lg.edges[e].arc_merged ? 0 : 1];
}

// Mixed-state coefficient of the fractional extreme of a self-loop block:
// the point with tau = (1/2, 1/2) puts weight 1/2 on the 01 mass.
double loop_mixed_coef(const LiftedGraph& lg, const LiftedParams& th, int e) {
  const auto& c = th.edge[e];
  return lg.edges[e].arc_merged ? c.arc01[0] : c.arc01[0] + c.arc01[1];
}

}  // namespace

MplpResult mplp_solve(const LiftedGraph& lg, const LiftedParams& theta, MplpOptions opt) {
  int nw = lg.num_node_orbits();
  int ne = lg.num_edge_orbits();

  // b[w][t] = node objective plus all message contributions; contrib[e][end][t]
  // is what edge orbit e currently adds to its endpoint beliefs (self-loops
  // keep their total in end 0).
  std::vector<std::array<double, 2>> b(nw);
  for (int w = 0; w < nw; ++w) b[w] = {theta.node[w][0], theta.node[w][1]};
  std::vector<std::array<std::array<double, 2>, 2>> contrib(
      ne, {{{0.0, 0.0}, {0.0, 0.0}}});

  auto dual_value = [&]() {
    double g = 0.0;
    for (int w = 0; w < nw; ++w) g += std::max(b[w][0], b[w][1]);
    for (int e = 0; e < ne; ++e) {
      const auto& o = lg.edges[e];
      if (o.self_loop()) {
        double d0 = contrib[e][0][0], d1 = contrib[e][0][1];
        g += std::max({theta.edge[e].same00 - d0, theta.edge[e].same11 - d1,
                       0.5 * (loop_mixed_coef(lg, theta, e) - d0 - d1)});
      } else {
        double best = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t)
            best = std::max(best,
                            pair_coef(lg, theta, e, s, t) - contrib[e][0][s] - contrib[e][1][t]);
        g += best;
      }
    }
    return g;
  };

  MplpResult res;
  res.dual_trace.push_back(dual_value());

  for (int sweep = 0; sweep < opt.max_sweeps && ne > 0; ++sweep) {
    for (int e = 0; e < ne; ++e) {
      const auto& o = lg.edges[e];
      if (o.self_loop()) {
        int w = o.orbit_u;
        double beta0 = b[w][0] - contrib[e][0][0];
        double beta1 = b[w][1] - contrib[e][0][1];
        double ext00 = beta0 + theta.edge[e].same00;
        double ext11 = beta1 + theta.edge[e].same11;
        double extq = 0.5 * (beta0 + beta1 + loop_mixed_coef(lg, theta, e));
        double m0 = std::max(ext00, extq), m1 = std::max(ext11, extq);
        contrib[e][0][0] = 0.5 * m0 - beta0;
        contrib[e][0][1] = 0.5 * m1 - beta1;
        b[w][0] = 0.5 * m0;
        b[w][1] = 0.5 * m1;
      } else {
        int u = o.orbit_u, v = o.orbit_v;
        std::array<double, 2> bu{b[u][0] - contrib[e][0][0], b[u][1] - contrib[e][0][1]};
        std::array<double, 2> bv{b[v][0] - contrib[e][1][0], b[v][1] - contrib[e][1][1]};
        for (int s = 0; s < 2; ++s) {
          double mu = std::max(pair_coef(lg, theta, e, s, 0) + bv[0],
                               pair_coef(lg, theta, e, s, 1) + bv[1]);
          contrib[e][0][s] = 0.5 * (mu - bu[s]);
          b[u][s] = 0.5 * (bu[s] + mu);
        }
        for (int t = 0; t < 2; ++t) {
          double mv = std::max(pair_coef(lg, theta, e, 0, t) + bu[0],
                               pair_coef(lg, theta, e, 1, t) + bu[1]);
          contrib[e][1][t] = 0.5 * (mv - bv[t]);
          b[v][t] = bv[t] + contrib[e][1][t];
        }
      }
    }
    double g = dual_value();
    double prev = res.dual_trace.back();
    res.dual_trace.push_back(g);
    res.sweeps = sweep + 1;
    if (std::fabs(prev - g) <= opt.tol) {
      res.converged = true;
      break;
    }
  }
  if (ne == 0) res.converged = true;

  res.dual = res.dual_trace.back();
  res.decoded.resize(nw);
  for (int w = 0; w < nw; ++w) res.decoded[w] = b[w][1] > b[w][0] ? 1 : 0;
  res.decoded_score = 0.0;
  for (int w = 0; w < nw; ++w) res.decoded_score += theta.node[w][res.decoded[w]];
  for (int e = 0; e < ne; ++e)
    res.decoded_score +=
        pair_coef(lg, theta, e, res.decoded[lg.edges[e].orbit_u], res.decoded[lg.edges[e].orbit_v]);
  return res;
}

}  // namespace liftmap
