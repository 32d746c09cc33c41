#pragma once

#include "liftmap/lift.hpp"

namespace liftmap {

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

struct LPSolution {
  LPStatus status = LPStatus::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

const char* to_string(LPStatus s);

// Dense two-phase primal simplex. Dantzig pricing, switching to Bland's rule
// after 1000 degenerate pivots. status == optimal implies the point passed a
// feasibility recheck against the original data (1e-8).
LPSolution lp_solve(const LinearProgram& lp);

}  // namespace liftmap
