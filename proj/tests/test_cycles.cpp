#include <doctest.h>

#include "helpers.hpp"
#include "liftmap/oracle.hpp"

using namespace liftmap;

namespace {

struct Setup {
  Model m;
  Graph g;
  LiftedGraph lg;
  LiftedParams th;
  LiftedVarLayout lay;
  Separator sep;
};

Setup ground_setup(Model model) {
  Setup s{std::move(model), {}, {}, {}, {}, {}};
  s.g = graph_structure(s.m);
  auto p = testing::lift_ground_problem(s.m, s.g);
  s.lg = std::move(p.lg);
  s.th = std::move(p.th);
  s.lay = LiftedVarLayout::make(s.lg);
  s.sep = testing::ground_separator(s.g, s.lg);
  return s;
}

Setup lifted_setup(Model model) {
  Setup s{std::move(model), {}, {}, {}, {}, {}};
  s.g = graph_structure(s.m);
  SymmetrySummary sym = model_symmetry(s.m, s.g);
  auto p = testing::lift_by(s.m, s.g, sym.var_orbits, sym.edge_orbits, sym.arc_orbits);
  s.lg = std::move(p.lg);
  s.th = std::move(p.th);
  s.lay = LiftedVarLayout::make(s.lg);
  s.sep = testing::graph_separator(s.m, s.g, s.lg);
  return s;
}

}  // namespace

TEST_CASE("cut rows accumulate repeated orbits") {
  Setup s = lifted_setup(testing::frustrated_triangle());
  REQUIRE(s.lg.num_edge_orbits() == 1);
  REQUIRE(s.lg.edges[0].arc_merged);

  CycleCut cut;
  cut.edge_orbits = {0, 0, 0};
  cut.in_f = {1, 0, 0};
  LinearProgram::Row row = cycle_cut_row(cut, s.lg, s.lay);
  // one traversal in F adds tau00+tau11, two outside F add the doubled arc
  REQUIRE(row.terms.size() == 3);
  CHECK(row.terms[0] == std::pair<int, double>{s.lay.pair00(0), 1.0});
  CHECK(row.terms[1] == std::pair<int, double>{s.lay.pair11(0), 1.0});
  CHECK(row.terms[2] == std::pair<int, double>{s.lay.arc_var(0, 0), 4.0});
  CHECK(row.rhs == 1.0);

  cut.in_f = {1, 1, 0};
  CHECK_THROWS_AS(eval_cycle_slack(cut, s.lg, s.lay, PseudoMarginal(s.lay.total, 0.0)), Error);
}

TEST_CASE("separation finds the frustrated triangle cut") {
  Setup s = ground_setup(testing::frustrated_triangle());
  // relaxation optimum: all pair mass on the disagreeing states
  PseudoMarginal tau(s.lay.total, 0.0);
  for (int w = 0; w < 3; ++w) {
    tau[s.lay.node_var(w, 0)] = 0.5;
    tau[s.lay.node_var(w, 1)] = 0.5;
  }
  for (int e = 0; e < 3; ++e) {
    tau[s.lay.arc_var(e, 0)] = 0.5;
    tau[s.lay.arc_var(e, 1)] = 0.5;
  }

  SeparationOutcome out = separate(s.sep, s.lg, s.lay, tau);
  REQUIRE(out.cut.has_value());
  CHECK_FALSE(out.negative_weights);
  // all three steps switch copies: F is the whole cycle and the lhs is zero
  CHECK(out.cut->slack == doctest::Approx(-1.0));
  CHECK(out.cut->edge_orbits.size() == 3);
  CHECK(out.cut->in_f == std::vector<uint8_t>{1, 1, 1});
  CHECK(eval_cycle_slack(*out.cut, s.lg, s.lay, tau) == doctest::Approx(out.cut->slack));
}

TEST_CASE("integral points admit no cut") {
  Setup s = ground_setup(testing::frustrated_triangle());
  PseudoMarginal tau = integral_point(s.lg, s.lay, {0, 0, 1});
  SeparationOutcome out = separate(s.sep, s.lg, s.lay, tau);
  CHECK_FALSE(out.cut.has_value());
}

TEST_CASE("reported slack matches reevaluation on random points") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> mdist(0.45, 0.55);
  int found = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Model m = testing::random_tied_model(rng, 7);
    Graph g = graph_structure(m);
    if (g.num_edges() < 3) continue;
    auto p = testing::lift_ground_problem(m, g);
    LiftedVarLayout lay = LiftedVarLayout::make(p.lg);
    Separator sep = testing::ground_separator(g, p.lg);

    // near-uniform marginals with maximal disagreement mass: any odd cycle
    // in the graph then yields a strongly violated inequality
    PseudoMarginal tau(lay.total, 0.0);
    std::vector<double> mu(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v) {
      mu[v] = mdist(rng);
      tau[2 * v + 0] = 1.0 - mu[v];
      tau[2 * v + 1] = mu[v];
    }
    for (int e = 0; e < g.num_edges(); ++e) {
      auto [u, v] = g.edges[e];
      double p11 = std::max(0.0, mu[u] + mu[v] - 1.0);
      tau[lay.pair00(e)] = 1.0 - mu[u] - mu[v] + p11;
      tau[lay.pair11(e)] = p11;
      tau[lay.arc_var(e, 0)] = mu[v] - p11;
      tau[lay.arc_var(e, 1)] = mu[u] - p11;
    }

    SeparationOutcome out = separate(sep, p.lg, lay, tau);
    if (!out.cut) continue;
    ++found;
    CHECK(out.cut->slack < 0);
    CHECK(eval_cycle_slack(*out.cut, p.lg, lay, tau) ==
          doctest::Approx(out.cut->slack).epsilon(1e-9));
  }
  CHECK(found > 0);
}

TEST_CASE("fixed views reject coarse node orbits") {
  Model m = testing::frustrated_triangle();
  Graph g = graph_structure(m);
  SymmetrySummary sym = model_symmetry(m, g);
  LiftedGraph full = build_lifted_graph(g, sym.var_orbits, sym.edge_orbits, sym.arc_orbits);
  // the full orbits do not fix any variable, so they make no valid view
  CHECK_THROWS_AS(make_fixed_view(g, full, sym.var_orbits, sym.edge_orbits, sym.arc_orbits, 0),
                  Error);
  SymmetrySummary stab = fixed_node_symmetry(m, g, 0);
  FixedLiftedView view =
      make_fixed_view(g, full, stab.var_orbits, stab.edge_orbits, stab.arc_orbits, 0);
  CHECK(view.fixed_var == 0);
  CHECK(view.local.nodes[view.fixed_node_orbit].members == std::vector<int>{0});
  for (int e = 0; e < view.local.num_edge_orbits(); ++e)
    CHECK(view.parent_edge_orbit[e] == 0);
}

TEST_CASE("cutting planes close the frustrated triangle gap") {
  Setup s = ground_setup(testing::frustrated_triangle());
  CutSolveResult r = cutting_plane_solve(lifted_local_lp(s.lg, s.th), s.lg, s.sep);
  REQUIRE(r.converged);
  REQUIRE(r.solution.status == LPStatus::optimal);
  CHECK(r.rounds <= 3);
  CHECK(r.objective_trace.front() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r.objective_trace.back() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(r.solution.objective == doctest::Approx(-1.0).epsilon(1e-8));
  for (size_t i = 1; i < r.objective_trace.size(); ++i)
    CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-9);
}

TEST_CASE("lifted cutting planes agree on the frustrated triangle") {
  Setup s = lifted_setup(testing::frustrated_triangle());
  REQUIRE(s.lay.total == 5);
  CutSolveResult r = cutting_plane_solve(lifted_local_lp(s.lg, s.th), s.lg, s.sep);
  REQUIRE(r.converged);
  CHECK(r.solution.objective == doctest::Approx(-1.0).epsilon(1e-8));
  REQUIRE(!r.cuts.empty());
  CHECK(r.cuts.front().via_node_orbit == 0);
}

TEST_CASE("odd holes close in both forms") {
  for (bool lifted : {false, true}) {
    Setup s = lifted ? lifted_setup(testing::frustrated_cycle(5))
                     : ground_setup(testing::frustrated_cycle(5));
    CutSolveResult r = cutting_plane_solve(lifted_local_lp(s.lg, s.th), s.lg, s.sep);
    REQUIRE(r.converged);
    CHECK(r.objective_trace.front() == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(r.solution.objective == doctest::Approx(-1.0).epsilon(1e-8));
  }
}

TEST_CASE("trees need no cuts") {
  std::mt19937 rng(67);
  Model m = testing::tied_model(rng, 6, testing::random_tree_edges(rng, 6), 1, 1, false);
  Setup s = ground_setup(m);
  CutSolveResult r = cutting_plane_solve(lifted_local_lp(s.lg, s.th), s.lg, s.sep);
  REQUIRE(r.converged);
  CHECK(r.rounds == 0);
  CHECK(r.cuts.empty());
}

TEST_CASE("round budget reports cleanly") {
  Setup s = ground_setup(testing::frustrated_cycle(7));
  CutSolveOptions opt;
  opt.max_rounds = 1;
  CutSolveResult r = cutting_plane_solve(lifted_local_lp(s.lg, s.th), s.lg, s.sep, opt);
  CHECK(r.rounds <= 1);
  if (!r.converged) CHECK(r.hit_round_limit);
}
