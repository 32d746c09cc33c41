#pragma once

#include <optional>

#include "liftmap/lift.hpp"
#include "liftmap/lp.hpp"

namespace liftmap {

// A violated cycle inequality over edge orbits of the full lifted graph:
//   sum_{pos in F} nocut(e) + sum_{pos not in F} cut(e) >= 1,  |F| odd,
// where nocut(e) = tau00 + tau11 and cut(e) = tau01 + tau10 (a merged orbit
// carries both mixed states on one variable, so its cut coefficient is 2).
struct CycleCut {
  std::vector<int> edge_orbits;  // walk order; repeats allowed
  std::vector<uint8_t> in_f;
  int via_node_orbit = -1;  // node orbit whose stabilizer view produced the cut
  double slack = 0.0;       // lhs - 1 at the separated point
};

double nocut_value(const LiftedVarLayout& lay, const PseudoMarginal& tau, int e);
double cut_value(const LiftedGraph& lg, const LiftedVarLayout& lay, const PseudoMarginal& tau,
                 int e);
double eval_cycle_slack(const CycleCut& cut, const LiftedGraph& lg, const LiftedVarLayout& lay,
                        const PseudoMarginal& tau);
LinearProgram::Row cycle_cut_row(const CycleCut& cut, const LiftedGraph& lg,
                                 const LiftedVarLayout& lay);

// Lifted graph of the stabilizer of one variable, used to separate cycles
// through that variable. Its orbits refine the full orbits; parent_edge_orbit
// maps each local edge orbit to the full one whose tau values weight it.
struct FixedLiftedView {
  int fixed_var = -1;
  int fixed_node_orbit = -1;  // orbit id in `local`; must be a singleton
  LiftedGraph local;
  std::vector<int> parent_edge_orbit;
};

FixedLiftedView make_fixed_view(const Graph& g, const LiftedGraph& full,
                                const OrbitPartition& node_orbits,
                                const OrbitPartition& edge_orbits,
                                const OrbitPartition& arc_orbits, int var);

// One view per node orbit representative of the full lifted graph.
struct Separator {
  std::vector<FixedLiftedView> views;
};

struct SeparationOutcome {
  std::optional<CycleCut> cut;  // most violated cycle found, if any
  bool negative_weights = false;  // slightly negative pair mass was clamped to 0
};

// Shortest path between the two copies of the fixed variable in the two-copy
// mirror of the view: staying in a copy costs cut(e), switching copies costs
// nocut(e). A path of weight < 1 yields a violated inequality whose F is the
// set of copy switches (odd by construction).
SeparationOutcome separate_at(const FixedLiftedView& view, const LiftedGraph& full,
                              const LiftedVarLayout& lay, const PseudoMarginal& tau);
SeparationOutcome separate(const Separator& sep, const LiftedGraph& full,
                           const LiftedVarLayout& lay, const PseudoMarginal& tau);

struct CutSolveOptions {
  int max_rounds = 500;
  double violation_tol = 1e-7;  // cuts violated by less than this are ignored
};

struct CutSolveResult {
  LPSolution solution;
  std::vector<double> objective_trace;  // relaxation optimum after each solve
  std::vector<CycleCut> cuts;
  int rounds = 0;  // cuts added
  bool converged = false;
  bool hit_round_limit = false;
  bool repeated_cut = false;
  bool negative_weights = false;
  LinearProgram lp;  // final program including all added rows
};

// Iterates: solve, separate, add the single most violated cut, resolve.
CutSolveResult cutting_plane_solve(LinearProgram lp, const LiftedGraph& lg, const Separator& sep,
                                   CutSolveOptions opt = {});

}  // namespace liftmap
