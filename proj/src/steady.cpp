#include "memsx/steady.hpp"

#include <cmath>
#include <limits>

namespace memsx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PlateOperator {
  const ModelParams* params;
  const Grid* grid;
  std::vector<double> apply(const std::vector<double>& u_total) const {
    std::vector<double> out;
    plate_operator_apply(u_total, *params, *grid, out);
    return out;
  }
};

// Interior residual R = (beta Lap^2 - tau Lap) u + lambda g(u); throws only
// through force evaluation (singular / degenerate states map to +inf merit).
bool residual(const DeflectionField& u, const ForceModelSpec& model, const ModelParams& params,
              const Grid& grid, std::vector<double>& r) {
  std::vector<double> g;
  try {
    g = eval_force(u, model, params, grid).g;
  } catch (const SingularForce&) {
    return false;
  } catch (const DegenerateDomain&) {
    return false;
  }
  std::vector<double> au;
  plate_operator_apply(u.values(), params, grid, au);
  r.resize(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i) r[i] = au[i] + params.lambda * g[i + 1];
  return true;
}

// Complementarity merit: max_i |min(u_i + 1, R_i)| over interior nodes.
double merit_of(const std::vector<double>& u_total, const std::vector<double>& r,
                const Grid& grid) {
  double m = 0.0;
  for (int i = 0; i < grid.n_x; ++i)
    m = std::max(m, std::fabs(std::min(u_total[i + 1] + 1.0, r[i])));
  return m;
}

// Stiffness rows of beta Lap^2 - tau Lap with the clamped ghost closure.
BandedMatrix plate_matrix_shift(const ModelParams& params, const Grid& grid) {
  const int n = grid.n_x;
  const double h = grid.h_x;
  const double ih2 = 1.0 / (h * h), ih4 = ih2 * ih2;
  BandedMatrix A(n, 2, 2);
  for (int rI = 0; rI < n; ++rI) {
    if (params.tau > 0.0) {
      A.at(rI, rI) += 2.0 * params.tau * ih2;
      if (rI > 0) A.at(rI, rI - 1) += -params.tau * ih2;
      if (rI + 1 < n) A.at(rI, rI + 1) += -params.tau * ih2;
    }
    if (params.beta > 0.0) {
      const double c0 = (rI == 0 || rI == n - 1) ? 7.0 : 6.0;
      A.at(rI, rI) += params.beta * c0 * ih4;
      if (rI > 0) A.at(rI, rI - 1) += -4.0 * params.beta * ih4;
      if (rI + 1 < n) A.at(rI, rI + 1) += -4.0 * params.beta * ih4;
      if (rI > 1) A.at(rI, rI - 2) += params.beta * ih4;
      if (rI + 2 < n) A.at(rI, rI + 2) += params.beta * ih4;
    }
  }
  return A;
}

SteadyResult steady_reduced(const ForceModelSpec& model, const ModelParams& params,
                            const Grid& grid, const DeflectionField& u_init);

// Bounded gradient-flow relaxation used when the damped Newton stalls (it
// cannot jump across the fold onto a zipped branch from an unzipped guess).
bool relax_toward_steady(const ForceModelSpec& model, const ModelParams& params,
                         const Grid& grid, DeflectionField& u) {
  ModelParams p = params;
  p.gamma2 = 0.0;
  p.obstacle_mode = ObstacleMode::Projection;
  p.steady_tol = 1.0e-9;
  try {
    PlateState init;
    init.u = u;
    const double dt = 2.5 * grid.h_x * grid.h_x;
    const Trajectory tr = simulate(init, model, p, grid, dt, 200.0, 1 << 30);
    if (tr.termination == Termination::TouchdownBreakdown) return false;
    u = DeflectionField(tr.final_u, params.u_max);
    return true;
  } catch (const SingularForce&) {
    return false;
  } catch (const BlowUp&) {
    return false;
  }
}

SteadyResult steady_reduced_newton(const ForceModelSpec& model, const ModelParams& params,
                                   const Grid& grid, const DeflectionField& u_init) {
  const int n = grid.n_x;
  SteadyResult res;
  res.u = u_init;

  std::vector<double> u = u_init.values();
  for (double& v : u) v = std::max(v, -1.0);
  u.front() = 0.0;
  u.back() = 0.0;

  std::vector<double> n_field = model.n_field;
  if (n_field.empty()) n_field.assign(grid.mx(), 0.0);

  std::vector<double> r;
  DeflectionField uf(u, params.u_max);
  if (!residual(uf, model, params, grid, r)) return res;
  double merit = merit_of(u, r, grid);

  for (int it = 1; it <= params.newton_max_iter; ++it) {
    res.iterations = it;
    if (merit <= params.tol_newton) {
      res.converged = true;
      break;
    }

    // primal-dual active set: pinned where the reaction beats the remaining
    // gap; the gap is weighted by the operator diagonal so both sides scale
    // like a residual
    const double h2 = grid.h_x * grid.h_x;
    const double c_scale = 2.0 * params.tau / h2 + 6.0 * params.beta / (h2 * h2) + 1.0;
    std::vector<std::uint8_t> active(n, 0);
    for (int i = 0; i < n; ++i)
      if (r[i] > c_scale * (u[i + 1] + 1.0)) active[i] = 1;

    std::vector<double> gp;
    try {
      gp = force_reduced_derivative(uf, n_field);
    } catch (const SingularForce&) {
      break;  // classical force pinned at the obstacle: no steady state here
    }
    BandedMatrix J = plate_matrix_shift(params, grid);
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      if (active[i]) {
        J.at(i, i) += 1.0e30;  // pin row: drive node onto the obstacle
        rhs[i] = 1.0e30 * (-1.0 - u[i + 1]);
      } else {
        J.at(i, i) += params.lambda * gp[i + 1];
        rhs[i] = -r[i];
      }
    }
    J.factorize();
    J.solve(rhs);

    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half <= 30; ++half) {
      std::vector<double> trial = u;
      for (int i = 0; i < n; ++i)
        trial[i + 1] = std::max(-1.0, u[i + 1] + alpha * rhs[i]);
      double mt = kInf;
      std::vector<double> rt;
      bool admissible = true;
      DeflectionField tf;
      try {
        tf = DeflectionField(trial, params.u_max);
      } catch (const InvalidArgument&) {
        admissible = false;  // diverging trial (u_max breached): backtrack
      }
      if (admissible && residual(tf, model, params, grid, rt)) mt = merit_of(trial, rt, grid);
      if (mt < merit || mt <= params.tol_newton) {
        u = std::move(trial);
        uf = std::move(tf);
        r = std::move(rt);
        merit = mt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stalled line search: report non-convergence
  }

  if (merit <= params.tol_newton) res.converged = true;
  res.u = uf;
  res.residual = merit;
  for (int i = 0; i < grid.mx(); ++i)
    if (uf[i] <= -1.0 + params.contact_tol) ++res.zipped_count;
  return res;
}

SteadyResult steady_reduced(const ForceModelSpec& model, const ModelParams& params,
                            const Grid& grid, const DeflectionField& u_init) {
  SteadyResult res = steady_reduced_newton(model, params, grid, u_init);
  if (res.converged) return res;
  DeflectionField relaxed = res.u;
  if (!relax_toward_steady(model, params, grid, relaxed)) return res;
  SteadyResult retry = steady_reduced_newton(model, params, grid, relaxed);
  retry.iterations += res.iterations;
  return retry;
}

SteadyResult steady_potential(const ForceModelSpec& model, const ModelParams& params,
                              const Grid& grid, const DeflectionField& u_init) {
  const int n = grid.n_x;
  SteadyResult res;
  res.u = u_init;

  BandedMatrix A = plate_matrix_shift(params, grid);
  A.factorize();

  std::vector<double> u = u_init.values();
  u.front() = 0.0;
  u.back() = 0.0;
  DeflectionField uf(u, params.u_max);

  for (int it = 1; it <= params.newton_max_iter; ++it) {
    res.iterations = it;
    ForceEval fe;
    try {
      fe = eval_force(uf, model, params, grid);
    } catch (const DegenerateDomain&) {
      res.converged = false;
      res.u = uf;
      return res;
    }
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -params.lambda * fe.g[i + 1];
    A.solve(rhs);

    double move = 0.0;
    std::vector<double> unew(grid.mx(), 0.0);
    for (int i = 0; i < n; ++i) {
      unew[i + 1] = std::max(-1.0, rhs[i]);
      move = std::max(move, std::fabs(unew[i + 1] - u[i + 1]));
    }
    u = std::move(unew);
    try {
      uf = DeflectionField(u, params.u_max);
    } catch (const InvalidArgument&) {
      res.converged = false;
      return res;
    }
    if (move <= std::max(params.tol_newton, 1.0e-13)) {
      res.converged = true;
      break;
    }
  }

  res.u = uf;
  std::vector<double> r;
  if (residual(uf, model, params, grid, r)) res.residual = merit_of(u, r, grid);
  for (int i = 0; i < grid.mx(); ++i)
    if (uf[i] <= -1.0 + params.contact_tol) ++res.zipped_count;
  return res;
}

}  // namespace

SteadyResult steady_solve(double lambda, const ForceModelSpec& model, const ModelParams& params,
                          const Grid& grid, const DeflectionField& u_init) {
  if (u_init.size() != grid.mx()) throw InvalidArgument("steady_solve: u_init size mismatch");
  ModelParams p = params;
  p.lambda = lambda;
  if (model.reduced()) return steady_reduced(model, p, grid, u_init);
  return steady_potential(model, p, grid, u_init);
}

PullInResult pull_in(const ForceModelSpec& model, const ModelParams& params, const Grid& grid,
                     double lambda_lo, double lambda_hi, double tol_lambda, double dyn_dt,
                     double dyn_t_end) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
    throw InvalidArgument("pull_in: bracket must satisfy 0 < lo < hi");
  if (!(tol_lambda > 0.0)) throw InvalidArgument("pull_in: tol_lambda must be > 0");
  if (dyn_dt <= 0.0) dyn_dt = grid.h_x * grid.h_x / 4.0;

  PullInResult out;
  DeflectionField warm = flat_deflection(grid, 0.0, params.u_max);

  // (a) steady continuation: "has an unzipped steady state"
  auto steady_ok = [&](double lam) {
    SteadyResult s = steady_solve(lam, model, params, grid, warm);
    if (s.converged && s.zipped_count == 0) {
      warm = s.u;
      return true;
    }
    return false;
  };
  // (b) dynamics from rest: "no touchdown before settling"
  auto dynamic_ok = [&](double lam) {
    ModelParams p = params;
    p.lambda = lam;
    const Trajectory tr = simulate(rest_state(grid, p), model, p, grid, dyn_dt, dyn_t_end,
                                   1 << 30);
    return !tr.touchdown_time.has_value();
  };

  const bool lo_s = steady_ok(lambda_lo);
  const bool hi_s = steady_ok(lambda_hi);
  if (lo_s == hi_s) throw InvalidBracket("pull_in: both bracket endpoints classify alike (steady)");
  {
    double lo = lambda_lo, hi = lambda_hi;
    warm = flat_deflection(grid, 0.0, params.u_max);
    (void)steady_ok(lo);  // re-warm from the convergent endpoint
    while (hi - lo > tol_lambda) {
      const double mid = 0.5 * (lo + hi);
      ++out.steady_bisections;
      if (steady_ok(mid))
        lo = mid;
      else
        hi = mid;
      if (out.steady_bisections > 200) break;
    }
    out.lambda_steady = 0.5 * (lo + hi);
  }

  const bool lo_d = dynamic_ok(lambda_lo);
  const bool hi_d = dynamic_ok(lambda_hi);
  if (lo_d == hi_d)
    throw InvalidBracket("pull_in: both bracket endpoints classify alike (dynamic)");
  {
    double lo = lambda_lo, hi = lambda_hi;
    while (hi - lo > tol_lambda) {
      const double mid = 0.5 * (lo + hi);
      ++out.dynamic_bisections;
      if (dynamic_ok(mid))
        lo = mid;
      else
        hi = mid;
      if (out.dynamic_bisections > 200) break;
    }
    out.lambda_dynamic = 0.5 * (lo + hi);
  }

  out.gap = std::fabs(out.lambda_steady - out.lambda_dynamic);
  return out;
}

BifurcationTable bifurcation_diagram(const ForceModelSpec& model, const ModelParams& params,
                                     const Grid& grid, const std::vector<double>& lambda_grid) {
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw InvalidArgument("bifurcation_diagram: lambda grid must be strictly increasing");

  BifurcationTable table;
  DeflectionField warm = flat_deflection(grid, 0.0, params.u_max);
  for (double lam : lambda_grid) {
    SteadyResult s = steady_solve(lam, model, params, grid, warm);
    BifurcationRow row;
    row.lambda = lam;
    row.converged = s.converged;
    row.newton_iterations = s.iterations;
    if (s.converged) {
      warm = s.u;
      row.zipped_count = s.zipped_count;
      double uinf = 0.0;
      for (int i = 0; i < s.u.size(); ++i) uinf = std::max(uinf, std::fabs(s.u[i]));
      row.u_inf = uinf;
      row.min_u = s.u.min();
      ModelParams p = params;
      p.lambda = lam;
      const ForceEval fe = eval_force(s.u, model, p, grid);
      row.energy_total = mechanical_energy(s.u, p, grid) + lam * fe.electrostatic_energy;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace memsx
