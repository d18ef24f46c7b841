#pragma once

#include <optional>
#include <vector>

#include "memsx/forces.hpp"
#include "memsx/grid.hpp"
#include "memsx/linalg.hpp"
#include "memsx/params.hpp"
#include "memsx/potential.hpp"

namespace memsx {

// Force model driving the plate equation. Reduced kinds carry a per-node N
// field; potential kinds refresh an electrostatic solve every step.
struct ForceModelSpec {
  enum class Kind {
    ReducedClassical,
    ReducedTransmission,
    ReducedRobin,
    Transmission,
    Membrane,
    Robin
  };
  Kind kind = Kind::ReducedClassical;
  std::vector<double> n_field;  // reduced kinds (empty => zeros)
  PermittivityProfile profile;  // potential kinds needing sigma_*

  bool reduced() const {
    return kind == Kind::ReducedClassical || kind == Kind::ReducedTransmission ||
           kind == Kind::ReducedRobin;
  }

  static ForceModelSpec reduced_classical();
  static ForceModelSpec reduced_transmission(const PermittivityProfile& profile,
                                             const Grid& grid, const ModelParams& params);
  static ForceModelSpec reduced_constant_n(const Grid& grid, double n_value);
  static ForceModelSpec reduced_robin(const PermittivityProfile& profile, const Grid& grid);
  static ForceModelSpec potential(ForceModelSpec::Kind kind, const PermittivityProfile& profile);
};

// Force + electrostatic energy at the current deflection.
struct ForceEval {
  std::vector<double> g;
  double electrostatic_energy = 0.0;
};

ForceEval eval_force(const DeflectionField& u, const ForceModelSpec& model,
                     const ModelParams& params, const Grid& grid);

struct PlateState {
  DeflectionField u;
  std::vector<double> velocity;      // empty iff gamma2 == 0
  std::vector<double> acceleration;  // Newmark bookkeeping, empty iff gamma2 == 0
  double t = 0.0;
};

PlateState rest_state(const Grid& grid, const ModelParams& params);

struct TrajectorySample {
  double t = 0.0;
  double min_u = 0.0;
  double e_mech = 0.0;
  double e_elec_scaled = 0.0;  // lambda * E_e
  double e_kinetic = 0.0;
  double total = 0.0;
  int zipped_count = 0;
};

enum class Termination { TimeEnd, Steady, TouchdownBreakdown };

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<double> final_u;
  std::optional<double> touchdown_time;
  std::vector<std::uint8_t> zipped_mask;  // at the final state
  bool steady = false;
  Termination termination = Termination::TimeEnd;
};

struct ReactionField {
  std::vector<double> zeta;
};

// (beta/2) int |Lap u|^2 + (tau/2) int |grad u|^2 by second-order stencils;
// the obstacle indicator contributes zero for admissible u.
double mechanical_energy(const DeflectionField& u, const ModelParams& params, const Grid& grid);

// Ledger variant whose gradient matches the discrete plate operator exactly
// (adds the clamped ghost-closure end terms when beta > 0), so the gamma=0
// scheme is a descent method for E_m + lambda E_e.
double mechanical_energy_consistent(const DeflectionField& u, const ModelParams& params,
                                    const Grid& grid);

// Interior-node stiffness action (beta Lap^2 - tau Lap) u with the clamped
// (beta>0) ghost closure; out has n_x entries.
void plate_operator_apply(const std::vector<double>& u_total, const ModelParams& params,
                          const Grid& grid, std::vector<double>& out);

// One step of the semi-implicit scheme (gamma2=0: implicit stiffness /
// explicit force Euler; gamma2>0: average-acceleration Newmark with the same
// splitting) plus the configured obstacle treatment.
PlateState step(const PlateState& state, double dt, const ForceModelSpec& model,
                const ModelParams& params, const Grid& grid);

Trajectory simulate(const PlateState& init, const ForceModelSpec& model,
                    const ModelParams& params, const Grid& grid, double dt, double t_end,
                    int sample_every = 1);

// Steady residual -lambda g - (beta Lap^2 - tau Lap) u, i.e. the obstacle
// reaction: ~0 off the contact set, <= 0 on it.
ReactionField extract_reaction(const DeflectionField& u_steady, const ForceModelSpec& model,
                               const ModelParams& params, const Grid& grid);

}  // namespace memsx
