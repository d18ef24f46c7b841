#pragma once

#include <optional>
#include <vector>

#include "memsx/dynamics.hpp"

namespace memsx {

struct SteadyResult {
  bool converged = false;
  DeflectionField u;
  int iterations = 0;
  double residual = 0.0;
  int zipped_count = 0;
};

// Damped Newton with active-set projection on the obstacle for reduced
// forces (analytic Jacobian); frozen-force fixed point for potential-based
// models. Non-convergence is reported, not thrown: the pull-in bracketing
// interprets it as "no steady state" in a purely operational sense.
SteadyResult steady_solve(double lambda, const ForceModelSpec& model, const ModelParams& params,
                          const Grid& grid, const DeflectionField& u_init);

struct PullInResult {
  double lambda_steady = 0.0;   // continuation bisection on steady_solve
  double lambda_dynamic = 0.0;  // bisection on touchdown of simulate from rest
  double gap = 0.0;             // |difference|
  int steady_bisections = 0;
  int dynamic_bisections = 0;
};

// Two independent pull-in estimates refined to tol_lambda. The bracket
// endpoints must classify differently (lo admits a steady state / no
// touchdown, hi does not), else InvalidBracket.
PullInResult pull_in(const ForceModelSpec& model, const ModelParams& params, const Grid& grid,
                     double lambda_lo, double lambda_hi, double tol_lambda,
                     double dyn_dt = 0.0, double dyn_t_end = 2000.0);

struct BifurcationRow {
  double lambda = 0.0;
  double u_inf = 0.0;
  double min_u = 0.0;
  double energy_total = 0.0;
  bool converged = false;
  int zipped_count = 0;
  int newton_iterations = 0;
};

struct BifurcationTable {
  std::vector<BifurcationRow> rows;
};

// Warm-started continuation over a strictly increasing lambda grid;
// non-convergence is data, not an error.
BifurcationTable bifurcation_diagram(const ForceModelSpec& model, const ModelParams& params,
                                     const Grid& grid, const std::vector<double>& lambda_grid);

}  // namespace memsx
