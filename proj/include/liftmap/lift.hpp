#pragma once

#include "liftmap/autgroup.hpp"
#include "liftmap/model.hpp"

namespace liftmap {

// Quotient of the structure graph by node/edge/arc orbits. Self-loops and
// parallel edge orbits are allowed. An edge orbit has merged arcs when the
// two arc directions of its representative lie in one arc orbit.
struct LiftedGraph {
  struct NodeOrbit {
    std::vector<int> members;  // ground node ids, sorted
    int rep = -1;              // smallest member
    int size = 0;
  };
  struct EdgeOrbit {
    std::vector<int> members;  // ground edge ids, sorted
    int rep_edge = -1;
    int rep_u = -1, rep_v = -1;  // endpoints of rep edge, u < v
    int orbit_u = -1, orbit_v = -1;
    int size = 0;
    bool arc_merged = false;
    bool self_loop() const { return orbit_u == orbit_v; }
  };
  std::vector<NodeOrbit> nodes;
  std::vector<EdgeOrbit> edges;
  std::vector<int> node_orbit_of;  // ground node -> node orbit
  std::vector<int> edge_orbit_of;  // ground edge -> edge orbit
  std::vector<int> arc_slot_of;    // ground arc (2e+dir) -> 0/1; merged orbits use 0

  int num_node_orbits() const { return static_cast<int>(nodes.size()); }
  int num_edge_orbits() const { return static_cast<int>(edges.size()); }
};

LiftedGraph build_lifted_graph(const Graph& g, const OrbitPartition& node_orbits,
                               const OrbitPartition& edge_orbits,
                               const OrbitPartition& arc_orbits);
// Singleton orbits: the ground problem in lifted form.
LiftedGraph trivial_lifted_graph(const Graph& g);

// Lifted parameters: orbit size times the (orbit-constant) overcomplete value.
// Merged arc orbits carry weight 2|edge orbit| on their single 01 entry.
struct LiftedParams {
  struct EdgeTerms {
    double same00 = 0, same11 = 0;
    double arc01[2] = {0, 0};  // slot 0: rep (u,v) direction; slot 1 unused when merged
  };
  std::vector<std::array<double, 2>> node;  // per node orbit
  std::vector<EdgeTerms> edge;              // per edge orbit
};

// Validates that theta is constant on every orbit (tolerance 1e-9).
LiftedParams lift_parameters(const OvercompleteParams& theta, const Graph& g,
                             const LiftedGraph& lg);

// Variable layout of the (lifted) LOCAL polytope LP:
//   node orbit w, state t       -> 2w + t
//   edge orbit e                -> base[e] + {0: both-0, 1: both-1, 2: arc slot 0,
//                                             3: arc slot 1 (absent when merged)}
struct LiftedVarLayout {
  std::vector<int> edge_base;
  std::vector<uint8_t> merged;
  int num_node_orbits = 0;
  int total = 0;

  static LiftedVarLayout make(const LiftedGraph& lg);
  int node_var(int w, int t) const { return 2 * w + t; }
  int pair00(int e) const { return edge_base[e]; }
  int pair11(int e) const { return edge_base[e] + 1; }
  int arc_var(int e, int slot) const { return edge_base[e] + 2 + (merged[e] ? 0 : slot); }
  int pair_vars(int e) const { return merged[e] ? 3 : 4; }
};

struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> terms;  // sorted by variable id
    double rhs = 0;
  };
  std::vector<std::string> var_names;
  std::vector<double> objective;  // maximize
  std::vector<Row> equalities;    // terms . x == rhs
  std::vector<Row> geq;           // terms . x >= rhs
  std::vector<double> lower, upper;
  bool bounds_implied = false;  // upper bounds already follow from the equalities

  int num_vars() const { return static_cast<int>(objective.size()); }
};

// Values for every LP variable in the layouts above.
using PseudoMarginal = std::vector<double>;

// Ground LOCAL polytope: 2|V|+4|E| variables, |V| normalization rows plus
// four edge consistency rows per edge. Objective is zero.
LinearProgram local_constraints(const Graph& g);
// Same system over orbit variables, with rows deduplicated after orbit
// substitution (merged arcs collapse the two 01 entries).
LinearProgram lifted_local_constraints(const LiftedGraph& lg);

LinearProgram local_lp(const Graph& g, const OvercompleteParams& theta);
LinearProgram lifted_local_lp(const LiftedGraph& lg, const LiftedParams& theta);

// Orbit-constant ground point realizing the lifted point.
PseudoMarginal expand(const PseudoMarginal& lifted, const LiftedGraph& lg, const Graph& g);

// Max violation over equalities, inequalities, and bounds.
double max_constraint_violation(const LinearProgram& lp, const PseudoMarginal& x);

double objective_value(const LinearProgram& lp, const PseudoMarginal& x);

// Integral pseudomarginal of an orbit-constant labeling (state per node orbit).
PseudoMarginal integral_point(const LiftedGraph& lg, const LiftedVarLayout& lay,
                              const std::vector<int>& states);

// LP text form (Maximize / Subject To / Bounds / End).
std::string lp_to_text(const LinearProgram& lp);

}  // namespace liftmap
