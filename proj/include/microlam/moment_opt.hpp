#pragma once

#include "microlam/laminate.hpp"

namespace microlam {

struct MomentSolverOptions {
  double barrier_init = 0.1;     // initial barrier weight, scaled by energy
  double barrier_shrink = 0.2;   // multiplicative reduction per outer step
  int outer_iterations = 20;
  int max_inner = 60;            // Newton steps per barrier value
  double grad_tol = 1e-10;
};

struct MomentSolution {
  MomentVector m;
  double energy = 0.0;
  double kkt_residual = 0.0;  // stationarity + complementarity, normalized
  int iterations = 0;         // total Newton steps
  bool converged = false;
};

// Minimizes the weighted complementary energy over the feasible moment set
// with a log-barrier interior point method. The problem is convex; the
// solution is often on the boundary (low-rank laminates), which the barrier
// approaches from inside.
MomentSolution optimize_moments(const LoadSet& loads, double f,
                                const MaterialPair& mat,
                                const MomentSolverOptions& opts = {});

struct OracleResult {
  MomentVector m;
  double energy = 0.0;
  std::size_t points_evaluated = 0;
};

// Minimum over the lattice {-1, -1+h, ..., 1}^4 restricted to the feasible
// set, h = resolution. Intended as an independent check on the interior
// point solver. Per (m1, m2, m3) row the energy is rational in m4, so only
// the interval ends and lattice neighbours of its stationary points are
// evaluated; the result equals the full h^-4 scan.
OracleResult grid_search_oracle(const LoadSet& loads, double f,
                                const MaterialPair& mat, double resolution);

}  // namespace microlam
