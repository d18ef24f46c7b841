#pragma once

#include <vector>

#include "memsx/grid.hpp"
#include "memsx/linalg.hpp"
#include "memsx/params.hpp"
#include "memsx/permittivity.hpp"

namespace memsx {

enum class PotentialModel { Transmission, Membrane, Robin };

// Discrete electrostatic state on the mapped layer grids. psi1 holds the
// potential on R1 (index i*n_z1 + j, eta fastest), psi2 on R2 (i*n_z2 + k);
// psi2 is empty for the single-layer models. Boundary rows carry the
// Dirichlet data. energy is the dimensionless E_e(u) of the matching model.
struct PotentialSolution {
  PotentialModel model = PotentialModel::Membrane;
  Grid grid;
  double delta = 0.0;
  double eps = 0.0;
  std::vector<double> psi1;
  std::vector<double> psi2;
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;

  double p1(int i, int j) const { return psi1[static_cast<std::size_t>(i) * grid.n_z1 + j]; }
  double p2(int i, int k) const { return psi2[static_cast<std::size_t>(i) * grid.n_z2 + k]; }
};

// Full two-layer transmission problem: Ritz minimizer of the mapped
// sign-reversed energy with bilinear elements; the transmission conditions
// hold as natural conditions of the discrete form. delta=0 delegates to the
// membrane model. eps=0 takes the closed-form separable path.
PotentialSolution solve_transmission(const DeflectionField& u, const PermittivityProfile& profile,
                                     const ModelParams& params, const Grid& grid);

// Thin-plate O(1) limit: single layer with Dirichlet data (1+z)/(1+u(x)).
PotentialSolution solve_membrane(const DeflectionField& u, const ModelParams& params,
                                 const Grid& grid);

// Thin-plate O(d) limit: single layer, Dirichlet off the interface and a
// Robin-type natural condition on it; the reported energy includes the
// interface penalty term.
PotentialSolution solve_robin(const DeflectionField& u, const PermittivityProfile& profile,
                              const ModelParams& params, const Grid& grid);

// Interface flux mismatch eps^2 [[sigma psi_x]] u' - [[sigma psi_z]] sampled
// at interior plate nodes (diagnostic; tends to 0 under refinement).
std::vector<double> transmission_flux_mismatch(const PotentialSolution& sol,
                                               const DeflectionField& u,
                                               const PermittivityProfile& profile);

// Trapezoid over plate nodes of -1/2 / (1 + u + n_field): the reduced
// electrostatic energy shared by the vanishing-aspect-ratio formulas.
double reduced_energy(const DeflectionField& u, const std::vector<double>& n_field,
                      const Grid& grid);

}  // namespace memsx
