#pragma once

#include "liftmap/lift.hpp"

namespace liftmap {

struct MplpOptions {
  int max_sweeps = 5000;
  double tol = 1e-10;  // stop when the dual improves less than this per sweep
};

struct MplpResult {
  std::vector<double> dual_trace;  // initial value, then one entry per sweep
  double dual = 0.0;
  std::vector<int> decoded;  // state per node orbit, ties toward 0
  double decoded_score = 0.0;
  int sweeps = 0;
  bool converged = false;
};

// Block coordinate descent on the dual of the (lifted) LOCAL relaxation.
// Each edge orbit is one block, swept in id order; self-loop blocks (merged
// or not) use the three-extreme closed form of their pair polytope. The dual
// trace is nonincreasing and upper-bounds the LP optimum.
MplpResult mplp_solve(const LiftedGraph& lg, const LiftedParams& theta, MplpOptions opt = {});

}  // namespace liftmap
