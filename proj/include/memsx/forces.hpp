#pragma once

#include <vector>

#include "memsx/potential.hpp"

namespace memsx {

// Nodal electrostatic force density g over the plate grid; the evolution
// equation right-hand side is -lambda * g.
struct ForceField {
  PotentialModel model = PotentialModel::Membrane;
  std::vector<double> g;
};

// The four groups of the dimensionless transmission force: the vertical
// heterogeneity integral (zero for s-independent profiles), the top-surface
// trace term, and the two interface jump terms.
struct TransmissionForceParts {
  std::vector<double> heterogeneity;
  std::vector<double> top;
  std::vector<double> jump_tangential;
  std::vector<double> jump_normal;
};

TransmissionForceParts transmission_force_parts(const PotentialSolution& sol,
                                                const DeflectionField& u,
                                                const PermittivityProfile& profile,
                                                const ModelParams& params);

// Variational force of the full model (all four groups).
ForceField force_transmission(const PotentialSolution& sol, const DeflectionField& u,
                              const PermittivityProfile& profile, const ModelParams& params);

// A-priori force of the comparison model: top-surface trace term only.
ForceField force_pelesko(const PotentialSolution& sol, const DeflectionField& u,
                         const PermittivityProfile& profile, const ModelParams& params);

// Membrane-limit force: interface trace of the field energy density.
ForceField force_membrane(const PotentialSolution& sol, const DeflectionField& u,
                          const ModelParams& params);

// Robin-limit force, including the eps^2 divergence term evaluated by
// centered differencing of the nodal flux.
ForceField force_robin(const PotentialSolution& sol, const DeflectionField& u,
                       const PermittivityProfile& profile, const ModelParams& params);

// Vanishing-aspect-ratio force g = 1/2 (1+u+N)^-2 with a per-node N field
// (N = N_delta, 1/sigma_*(x,0), or 0). Throws SingularForce when the
// denominator vanishes.
ForceField force_reduced(const DeflectionField& u, const std::vector<double>& n_field,
                         const ModelParams& params);

// d g / d u for the reduced force (used by the steady Newton solver).
std::vector<double> force_reduced_derivative(const DeflectionField& u,
                                             const std::vector<double>& n_field);

struct ShapeDerivativeReport {
  double analytic = 0.0;     // int_D g(u) v dx
  double fd_centered = 0.0;  // [E(u+sv) - E(u-sv)] / 2s
  double fd_plus = 0.0;      // [E(u+sv) - E(u)] / s
  double fd_minus = 0.0;     // [E(u) - E(u-sv)] / s
  double rel_err = 0.0;      // |analytic - fd_centered| / max(|fd_centered|, eps)
  double step = 0.0;
  double energy = 0.0;  // E(u)
};

// Cross-validates an analytic force against the centered finite difference
// of its energy, using fresh potential solves at u +- s v. v must vanish at
// both endpoints; u +- s v must stay admissible.
ShapeDerivativeReport validate_shape_derivative(const DeflectionField& u,
                                                const std::vector<double>& v,
                                                PotentialModel model,
                                                const PermittivityProfile& profile,
                                                const ModelParams& params, const Grid& grid,
                                                double step);

// Seeded test fields: sum of scaled sin(k pi x), k <= 4, on the plate grid.
std::vector<double> seeded_test_field(const Grid& grid, std::uint64_t seed, double scale = 0.1);

}  // namespace memsx
