#include "liftmap/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liftmap {

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;
constexpr double kFeasTol = 1e-8;
constexpr int kMaxIters = 200000;
constexpr int kDegenerateLimit = 1000;

// Row-major (m+1) x (width) tableau; last row holds reduced costs, last
// column the right-hand side.
struct Tableau {
  int m = 0;
  int width = 0;
  std::vector<double> a;
  std::vector<int> basis;

  double& at(int r, int c) { return a[static_cast<size_t>(r) * width + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * width + c]; }

  void pivot(int pr, int pc) {
    double piv = at(pr, pc);
    double inv = 1.0 / piv;
    for (int c = 0; c < width; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r <= m; ++r) {
      if (r == pr) continue;
      double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c < width; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis[pr] = pc;
  }
};

// One simplex phase over columns [0, ncols). Returns false on unbounded.
bool run_phase(Tableau& t, int ncols, int& iterations, int& degenerate) {
  int rhs = t.width - 1;
  while (true) {
    if (iterations >= kMaxIters) return true;  // caller checks optimality
    bool bland = degenerate >= kDegenerateLimit;
    int enter = -1;
    double best = -kCostEps;
    for (int c = 0; c < ncols; ++c) {
      double rc = t.at(t.m, c);
      if (bland) {
        if (rc < -kCostEps) {
          enter = c;
          break;
        }
      } else if (rc < best) {
        best = rc;
        enter = c;
      }
    }
    if (enter < 0) return true;  // optimal for this phase

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t.m; ++r) {
      double coef = t.at(r, enter);
      if (coef <= kPivotEps) continue;
      double ratio = t.at(r, rhs) / coef;
      if (ratio < best_ratio - kPivotEps) {
        best_ratio = ratio;
        leave = r;
      } else if (ratio <= best_ratio + kPivotEps && leave >= 0) {
        if (bland) {
          if (t.basis[r] < t.basis[leave]) leave = r;
        } else if (std::fabs(coef) > std::fabs(t.at(leave, enter))) {
          leave = r;
        }
      }
    }
    if (leave < 0) return false;  // unbounded direction

    if (best_ratio <= kPivotEps) ++degenerate;
    t.pivot(leave, enter);
    ++iterations;
  }
}

}  // namespace

LPSolution lp_solve(const LinearProgram& lp) {
  int n = lp.num_vars();
  for (int v = 0; v < n; ++v) {
    if (lp.lower[v] != 0.0) throw ValidationError("lp_solve: nonzero lower bounds unsupported");
    if (lp.upper[v] < 0.0) throw ValidationError("lp_solve: negative upper bound");
  }

  // Assemble rows: equalities, inequalities (with surplus), then explicit
  // upper-bound rows unless the constraints already imply them.
  struct DenseRow {
    std::vector<double> coef;
    double rhs;
  };
  std::vector<DenseRow> rows;
  int num_surplus = 0;
  for (const auto& row : lp.geq) (void)row, ++num_surplus;
  std::vector<int> upper_vars;
  if (!lp.bounds_implied)
    for (int v = 0; v < n; ++v)
      if (std::isfinite(lp.upper[v])) upper_vars.push_back(v);

  int total_cols = n + num_surplus + static_cast<int>(upper_vars.size());
  auto make_dense = [&](const LinearProgram::Row& r) {
    DenseRow d;
    d.coef.assign(total_cols, 0.0);
    for (auto [var, c] : r.terms) d.coef[var] += c;
    d.rhs = r.rhs;
    return d;
  };
  for (const auto& r : lp.equalities) rows.push_back(make_dense(r));
  {
    int s = 0;
    for (const auto& r : lp.geq) {
      DenseRow d = make_dense(r);
      d.coef[n + s] = -1.0;
      rows.push_back(std::move(d));
      ++s;
    }
  }
  for (size_t k = 0; k < upper_vars.size(); ++k) {
    DenseRow d;
    d.coef.assign(total_cols, 0.0);
    d.coef[upper_vars[k]] = 1.0;
    d.coef[n + num_surplus + static_cast<int>(k)] = 1.0;
    d.rhs = lp.upper[upper_vars[k]];
    rows.push_back(std::move(d));
  }

  int m = static_cast<int>(rows.size());
  for (auto& r : rows)
    if (r.rhs < 0) {
      for (double& c : r.coef) c = -c;
      r.rhs = -r.rhs;
    }

  // Tableau with one artificial per row.
  Tableau t;
  t.m = m;
  t.width = total_cols + m + 1;
  t.a.assign(static_cast<size_t>(m + 1) * t.width, 0.0);
  t.basis.resize(m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < total_cols; ++c) t.at(r, c) = rows[r].coef[c];
    t.at(r, total_cols + r) = 1.0;
    t.at(r, t.width - 1) = rows[r].rhs;
    t.basis[r] = total_cols + r;
  }

  LPSolution sol;
  int degenerate = 0;

  // Phase 1: minimize sum of artificials. Reduced costs = -sum of rows.
  for (int c = 0; c < t.width; ++c) {
    double s = 0.0;
    for (int r = 0; r < m; ++r) s += t.at(r, c);
    t.at(m, c) = (c >= total_cols && c < total_cols + m) ? 0.0 : -s;
  }
  if (!run_phase(t, total_cols, sol.iterations, degenerate))
    throw Error("lp_solve: phase 1 reported unbounded");
  if (sol.iterations >= kMaxIters) {
    sol.status = LPStatus::iteration_limit;
    return sol;
  }
  {
    double art = 0.0;
    for (int r = 0; r < m; ++r)
      if (t.basis[r] >= total_cols) art += t.at(r, t.width - 1);
    double phase1 = -t.at(m, t.width - 1);
    if (std::max(art, phase1) > kFeasTol) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
  }
  // Pivot zero-level artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (t.basis[r] < total_cols) continue;
    int pc = -1;
    for (int c = 0; c < total_cols; ++c)
      if (std::fabs(t.at(r, c)) > kPivotEps) {
        pc = c;
        break;
      }
    if (pc >= 0) t.pivot(r, pc);
    // else: redundant row, harmless to leave the artificial basic at zero
  }

  // Phase 2: minimize -objective over structural + slack columns.
  for (int c = 0; c < t.width; ++c) t.at(m, c) = 0.0;
  for (int v = 0; v < n; ++v) t.at(m, v) = -lp.objective[v];
  for (int r = 0; r < m; ++r) {
    int b = t.basis[r];
    double cost = t.at(m, b);
    if (cost == 0.0) continue;
    for (int c = 0; c < t.width; ++c) t.at(m, c) -= cost * t.at(r, c);
    t.at(m, b) = 0.0;
  }
  if (!run_phase(t, total_cols, sol.iterations, degenerate)) {
    sol.status = LPStatus::unbounded;
    return sol;
  }
  if (sol.iterations >= kMaxIters) {
    sol.status = LPStatus::iteration_limit;
    return sol;
  }

  sol.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (t.basis[r] < n) sol.x[t.basis[r]] = t.at(r, t.width - 1);
  for (double& v : sol.x)
    if (std::fabs(v) < 1e-12) v = 0.0;

  sol.objective = 0.0;
  for (int v = 0; v < n; ++v) sol.objective += lp.objective[v] * sol.x[v];

  // Feasibility recheck against the original data.
  double viol = max_constraint_violation(lp, sol.x);
  if (viol > kFeasTol) throw Error("lp_solve: solution failed feasibility recheck");
  sol.status = LPStatus::optimal;
  return sol;
}

}  // namespace liftmap
