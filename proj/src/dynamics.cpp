#include "memsx/dynamics.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace memsx {

namespace {

// Penalty-mode states may undershoot the obstacle by lambda*max(g)/penalty_s;
// the type-level bound is relaxed for those states only.
constexpr double kPenaltyFloor = -2.0;

double lower_bound_for(const ModelParams& params) {
  return params.obstacle_mode == ObstacleMode::Penalty ? kPenaltyFloor : -1.0;
}

std::vector<double> zero_field(const Grid& grid) {
  return std::vector<double>(grid.mx(), 0.0);
}

}  // namespace

ForceModelSpec ForceModelSpec::reduced_classical() {
  ForceModelSpec m;
  m.kind = Kind::ReducedClassical;
  return m;
}

ForceModelSpec ForceModelSpec::reduced_transmission(const PermittivityProfile& profile,
                                                    const Grid& grid, const ModelParams& params) {
  ForceModelSpec m;
  m.kind = Kind::ReducedTransmission;
  m.profile = profile;
  m.n_field = n_delta(profile, grid, params.delta, params.quad_points);
  return m;
}

ForceModelSpec ForceModelSpec::reduced_constant_n(const Grid& grid, double n_value) {
  ForceModelSpec m;
  m.kind = Kind::ReducedTransmission;
  m.n_field.assign(grid.mx(), n_value);
  return m;
}

ForceModelSpec ForceModelSpec::reduced_robin(const PermittivityProfile& profile,
                                             const Grid& grid) {
  ForceModelSpec m;
  m.kind = Kind::ReducedRobin;
  m.profile = profile;
  m.n_field.resize(grid.mx());
  for (int i = 0; i < grid.mx(); ++i) {
    const double s0 = profile.eval(grid.x(i), 0.0);
    if (!(s0 > 0.0)) throw InvalidProfile("reduced_robin: nonpositive sigma_*(x,0)");
    m.n_field[i] = 1.0 / s0;
  }
  return m;
}

ForceModelSpec ForceModelSpec::potential(ForceModelSpec::Kind kind,
                                         const PermittivityProfile& profile) {
  ForceModelSpec m;
  m.kind = kind;
  m.profile = profile;
  return m;
}

ForceEval eval_force(const DeflectionField& u, const ForceModelSpec& model,
                     const ModelParams& params, const Grid& grid) {
  ForceEval out;
  switch (model.kind) {
    case ForceModelSpec::Kind::ReducedClassical: {
      const std::vector<double> zeros(grid.mx(), 0.0);
      out.g = force_reduced(u, zeros, params).g;
      out.electrostatic_energy = reduced_energy(u, zeros, grid);
      return out;
    }
    case ForceModelSpec::Kind::ReducedTransmission:
    case ForceModelSpec::Kind::ReducedRobin: {
      out.g = force_reduced(u, model.n_field, params).g;
      out.electrostatic_energy = reduced_energy(u, model.n_field, grid);
      return out;
    }
    case ForceModelSpec::Kind::Transmission: {
      const PotentialSolution sol = solve_transmission(u, model.profile, params, grid);
      out.g = force_transmission(sol, u, model.profile, params).g;
      out.electrostatic_energy = sol.energy;
      return out;
    }
    case ForceModelSpec::Kind::Membrane: {
      const PotentialSolution sol = solve_membrane(u, params, grid);
      out.g = force_membrane(sol, u, params).g;
      out.electrostatic_energy = sol.energy;
      return out;
    }
    case ForceModelSpec::Kind::Robin: {
      const PotentialSolution sol = solve_robin(u, model.profile, params, grid);
      out.g = force_robin(sol, u, model.profile, params).g;
      out.electrostatic_energy = sol.energy;
      return out;
    }
  }
  throw InvalidArgument("eval_force: unknown force model");
}

PlateState rest_state(const Grid& grid, const ModelParams& params) {
  PlateState s;
  s.u = flat_deflection(grid, 0.0, params.u_max);
  if (params.gamma2 > 0.0) {
    s.velocity = zero_field(grid);
    s.acceleration = zero_field(grid);
  }
  s.t = 0.0;
  return s;
}

double mechanical_energy(const DeflectionField& u, const ModelParams& params, const Grid& grid) {
  const int m = grid.mx();
  const double h = grid.h_x;
  double e = 0.0;
  if (params.tau > 0.0) {
    double s = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
      const double d = (u[i + 1] - u[i]) / h;
      s += d * d;
    }
    e += 0.5 * params.tau * s * h;
  }
  if (params.beta > 0.0) {
    double s = 0.0;
    for (int i = 1; i + 1 < m; ++i) {
      const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
      s += lap * lap;
    }
    e += 0.5 * params.beta * s * h;
  }
  return e;
}

double mechanical_energy_consistent(const DeflectionField& u, const ModelParams& params,
                                    const Grid& grid) {
  double e = mechanical_energy(u, params, grid);
  if (params.beta > 0.0) {
    // clamped ghost closure end terms (trapezoid weights), so that the
    // gradient of this energy is exactly h * (beta Lap^2 - tau Lap) u
    const int m = grid.mx();
    const double h = grid.h_x;
    const double lap0 = (2.0 * u[1] - 2.0 * u[0]) / (h * h);
    const double lap1 = (2.0 * u[m - 2] - 2.0 * u[m - 1]) / (h * h);
    e += 0.5 * params.beta * h * 0.5 * (lap0 * lap0 + lap1 * lap1);
  }
  return e;
}

void plate_operator_apply(const std::vector<double>& u, const ModelParams& params,
                          const Grid& grid, std::vector<double>& out) {
  const int m = grid.mx();
  const double h = grid.h_x;
  const double ih2 = 1.0 / (h * h);
  const double ih4 = ih2 * ih2;
  out.assign(grid.n_x, 0.0);
  for (int i = 1; i + 1 < m; ++i) {
    double r = 0.0;
    if (params.tau > 0.0) r += params.tau * (2.0 * u[i] - u[i - 1] - u[i + 1]) * ih2;
    if (params.beta > 0.0) {
      const double um2 = (i >= 2) ? u[i - 2] : u[1];          // ghost reflection at x=0
      const double up2 = (i + 2 < m) ? u[i + 2] : u[m - 2];   // ghost reflection at x=1
      r += params.beta * (um2 - 4.0 * u[i - 1] + 6.0 * u[i] - 4.0 * u[i + 1] + up2) * ih4;
    }
    out[i - 1] = r;
  }
}

namespace {

BandedMatrix plate_matrix(const ModelParams& params, const Grid& grid, double diag_shift) {
  const int n = grid.n_x;
  const double h = grid.h_x;
  const double ih2 = 1.0 / (h * h);
  const double ih4 = ih2 * ih2;
  BandedMatrix A(n, 2, 2);
  for (int r = 0; r < n; ++r) {
    A.at(r, r) += diag_shift;
    if (params.tau > 0.0) {
      A.at(r, r) += 2.0 * params.tau * ih2;
      if (r > 0) A.at(r, r - 1) += -params.tau * ih2;
      if (r + 1 < n) A.at(r, r + 1) += -params.tau * ih2;
    }
    if (params.beta > 0.0) {
      double c0 = 6.0;
      if (r == 0 || r == n - 1) c0 = 7.0;  // clamped ghost closure
      A.at(r, r) += params.beta * c0 * ih4;
      if (r > 0) A.at(r, r - 1) += -4.0 * params.beta * ih4;
      if (r + 1 < n) A.at(r, r + 1) += -4.0 * params.beta * ih4;
      if (r > 1) A.at(r, r - 2) += params.beta * ih4;
      if (r + 2 < n) A.at(r, r + 2) += params.beta * ih4;
    }
  }
  return A;
}

// Factorized step matrix for a fixed dt, reused across a whole run.
struct Stepper {
  double dt = 0.0;
  double c0 = 0.0;  // diagonal shift: 1/dt (gamma=0) or 4 gamma^2/dt^2 + 2/dt
  BandedMatrix M;

  Stepper(const ModelParams& params, const Grid& grid, double dt_) : dt(dt_) {
    c0 = params.gamma2 > 0.0 ? 4.0 * params.gamma2 / (dt * dt) + 2.0 / dt : 1.0 / dt;
    M = plate_matrix(params, grid, c0);
    M.factorize();
  }
};

PlateState advance(const PlateState& state, const Stepper& st, const ForceEval& force,
                   const ModelParams& params, const Grid& grid) {
  const int n = grid.n_x;
  const int m = grid.mx();
  const double dt = st.dt;
  const std::vector<double>& u = state.u.values();

  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = -params.lambda * force.g[i + 1];

  std::vector<double> base_rhs(n);
  if (params.gamma2 > 0.0) {
    const double cv = 4.0 * params.gamma2 / dt + 1.0;
    for (int i = 0; i < n; ++i)
      base_rhs[i] = f[i] + st.c0 * u[i + 1] + cv * state.velocity[i + 1] +
                    params.gamma2 * state.acceleration[i + 1];
  } else {
    for (int i = 0; i < n; ++i) base_rhs[i] = f[i] + u[i + 1] / dt;
  }

  std::vector<double> rhs = base_rhs;
  st.M.solve(rhs);

  if (params.obstacle_mode == ObstacleMode::Penalty) {
    // spring penalty penalty_s * (-1 - u)_+ on the violated set, treated
    // implicitly; the active set is refined until it is self-consistent.
    // At equilibrium the overshoot is lambda*g/penalty_s.
    std::vector<std::uint8_t> active(n, 0);
    for (int pass = 0; pass < 8; ++pass) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        const std::uint8_t want = rhs[i] < -1.0 ? 1 : 0;
        if (want != active[i]) changed = true;
        active[i] = want;
      }
      if (!changed) break;
      BandedMatrix M = plate_matrix(params, grid, st.c0);
      std::vector<double> b = base_rhs;
      for (int i = 0; i < n; ++i)
        if (active[i]) {
          M.at(i, i) += params.penalty_s;
          b[i] -= params.penalty_s;  // spring anchor at u = -1
        }
      M.factorize();
      M.solve(b);
      rhs = std::move(b);
    }
  }

  for (double v : rhs)
    if (!std::isfinite(v))
      throw BlowUp("step: non-finite deflection at t=" + std::to_string(state.t + dt) +
                   ", min_u=" + std::to_string(state.u.min()));

  PlateState next;
  next.t = state.t + dt;
  std::vector<double> unew(m, 0.0);
  std::vector<std::uint8_t> projected(m, 0);
  for (int i = 0; i < n; ++i) {
    double v = rhs[i];
    if (params.obstacle_mode == ObstacleMode::Projection && v < -1.0) {
      v = -1.0;
      projected[i + 1] = 1;
    }
    unew[i + 1] = v;
  }

  if (params.gamma2 > 0.0) {
    std::vector<double> vel(m, 0.0), acc(m, 0.0);
    for (int i = 1; i + 1 < m; ++i) {
      const double du = unew[i] - u[i];
      const double anew =
          4.0 / (dt * dt) * (du - dt * state.velocity[i]) - state.acceleration[i];
      acc[i] = anew;
      vel[i] = state.velocity[i] + 0.5 * dt * (state.acceleration[i] + anew);
      if (projected[i]) {  // inelastic contact
        vel[i] = 0.0;
        acc[i] = 0.0;
      }
    }
    next.velocity = std::move(vel);
    next.acceleration = std::move(acc);
  }
  next.u = DeflectionField(std::move(unew), params.u_max, lower_bound_for(params));
  return next;
}

int zipped_count(const DeflectionField& u, double contact_tol) {
  int c = 0;
  for (int i = 0; i < u.size(); ++i)
    if (u[i] <= -1.0 + contact_tol) ++c;
  return c;
}

double kinetic_energy(const PlateState& s, const ModelParams& params, const Grid& grid) {
  if (params.gamma2 <= 0.0 || s.velocity.empty()) return 0.0;
  double q = 0.0;
  for (double v : s.velocity) q += v * v;
  return 0.5 * params.gamma2 * q * grid.h_x;
}

}  // namespace

PlateState step(const PlateState& state, double dt, const ForceModelSpec& model,
                const ModelParams& params, const Grid& grid) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be > 0");
  state.u.require_pinned();
  Stepper st(params, grid, dt);
  ForceEval force = eval_force(state.u, model, params, grid);
  PlateState init = state;
  if (params.gamma2 > 0.0 && init.velocity.empty()) {
    init.velocity = zero_field(grid);
    init.acceleration = zero_field(grid);
  }
  return advance(init, st, force, params, grid);
}

Trajectory simulate(const PlateState& init, const ForceModelSpec& model,
                    const ModelParams& params, const Grid& grid, double dt, double t_end,
                    int sample_every) {
  if (!(dt > 0.0)) throw InvalidArgument("simulate: dt must be > 0");
  if (!(t_end > 0.0)) throw InvalidArgument("simulate: t_end must be > 0");
  if (sample_every < 1) throw InvalidArgument("simulate: sample_every must be >= 1");
  init.u.require_pinned();

  const bool classical = model.kind == ForceModelSpec::Kind::ReducedClassical;
  const bool potential_based = !model.reduced();

  Stepper st(params, grid, dt);
  Trajectory traj;
  PlateState state = init;
  if (params.gamma2 > 0.0 && state.velocity.empty()) {
    state.velocity = zero_field(grid);
    state.acceleration = zero_field(grid);
  }

  const long n_steps = static_cast<long>(std::ceil(t_end / dt - 1.0e-12));
  auto record = [&](const PlateState& s, const ForceEval& force) {
    TrajectorySample sm;
    sm.t = s.t;
    sm.min_u = s.u.min();
    sm.e_mech = mechanical_energy_consistent(s.u, params, grid);
    sm.e_elec_scaled = params.lambda * force.electrostatic_energy;
    sm.e_kinetic = kinetic_energy(s, params, grid);
    sm.total = sm.e_mech + sm.e_elec_scaled + sm.e_kinetic;
    sm.zipped_count = zipped_count(s.u, params.contact_tol);
    traj.samples.push_back(sm);
  };

  ForceEval force = eval_force(state.u, model, params, grid);
  record(state, force);

  for (long n = 0; n < n_steps; ++n) {
    PlateState next = advance(state, st, force, params, grid);

    double move = 0.0;
    for (int i = 0; i < grid.mx(); ++i)
      move = std::max(move, std::fabs(next.u[i] - state.u[i]));

    const bool touched = next.u.min() <= -1.0 + params.contact_tol;
    if (touched && !traj.touchdown_time) traj.touchdown_time = next.t;

    // the transmission solver's gap threshold doubles as the breakdown line
    // for potential-based runs (contact dynamics belongs to reduced forces)
    const bool breakdown = (classical && touched) ||
                           (potential_based && next.u.min() < -1.0 + params.gap_tol);

    state = std::move(next);

    if (breakdown) {
      traj.termination = Termination::TouchdownBreakdown;
      record(state, force);  // pre-contact force; the contact state has no finite solve
      break;
    }

    const bool steady = (move / dt) <= params.steady_tol;
    const bool is_last = (n + 1 == n_steps);
    force = eval_force(state.u, model, params, grid);
    if (steady || is_last) {
      record(state, force);
      traj.steady = steady;
      traj.termination = steady ? Termination::Steady : Termination::TimeEnd;
      break;
    }
    if ((n + 1) % sample_every == 0) record(state, force);
  }

  traj.final_u = state.u.values();
  traj.zipped_mask.assign(grid.mx(), 0);
  for (int i = 0; i < grid.mx(); ++i)
    if (state.u[i] <= -1.0 + params.contact_tol) traj.zipped_mask[i] = 1;
  return traj;
}

ReactionField extract_reaction(const DeflectionField& u_steady, const ForceModelSpec& model,
                               const ModelParams& params, const Grid& grid) {
  const ForceEval force = eval_force(u_steady, model, params, grid);
  std::vector<double> au;
  plate_operator_apply(u_steady.values(), params, grid, au);
  ReactionField r;
  r.zeta.assign(grid.mx(), 0.0);
  for (int i = 0; i < grid.n_x; ++i)
    r.zeta[i + 1] = -params.lambda * force.g[i + 1] - au[i];
  return r;
}

}  // namespace memsx
