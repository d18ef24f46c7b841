#pragma once

#include <cstdint>

#include "memsx/errors.hpp"

namespace memsx {

enum class ObstacleMode { Projection, Penalty };

enum class LinearBackend { Pcg, Direct };

// Dimensionless model constants plus the numerical knobs shared by all
// solvers. Everything is in the rescaled variables: the plate lives on
// D=(0,1), the ground plate at z=-1, voltage normalized to 1.
struct ModelParams {
  double gamma2 = 0.0;  // inertia
  double beta = 0.0;    // bending
  double tau = 1.0;     // tension
  double lambda = 1.0;  // voltage parameter
  double delta = 0.1;   // relative plate thickness
  double eps = 0.1;     // aspect ratio

  double penalty_s = 1.0e4;
  ObstacleMode obstacle_mode = ObstacleMode::Projection;

  double tol_linear = 1.0e-10;
  double tol_newton = 1.0e-10;
  double gap_tol = 1.0e-6;      // min distance of u above -1 for potential solves
  double contact_tol = 1.0e-9;  // touchdown detection
  double steady_tol = 1.0e-8;   // ||du||_inf/dt threshold
  double u_max = 4.0;
  int quad_points = 33;  // composite Simpson for N_delta
  int newton_max_iter = 100;
  LinearBackend backend = LinearBackend::Pcg;

  std::uint64_t seed = 1;

  void validate() const {
    if (gamma2 < 0 || beta < 0 || tau < 0 || lambda < 0 || delta < 0 || eps < 0)
      throw InvalidArgument("ModelParams: gamma2, beta, tau, lambda, delta, eps must be >= 0");
    if (penalty_s <= 0) throw InvalidArgument("ModelParams: penalty_s must be > 0");
    if (tol_linear <= 0 || tol_newton <= 0 || gap_tol <= 0)
      throw InvalidArgument("ModelParams: tolerances must be > 0");
    if (u_max <= 0) throw InvalidArgument("ModelParams: u_max must be > 0");
  }
};

}  // namespace memsx
