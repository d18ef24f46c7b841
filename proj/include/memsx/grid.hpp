#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "memsx/errors.hpp"
#include "memsx/params.hpp"

namespace memsx {

// Uniform tensor grids for the plate line D=(0,1) and the two mapped layers
// R1 = D x (0,1) (eta coordinate) and R2 = D x (0,1) (zeta coordinate).
// n_x counts interior plate nodes; n_z1/n_z2 count vertical node levels
// including both ends, so the interface line eta=1 / zeta=0 is a node row
// of both layers and shares x coordinates by construction.
struct Grid {
  int n_x = 0;   // interior plate nodes
  int n_z1 = 0;  // vertical node levels in R1
  int n_z2 = 0;  // vertical node levels in R2
  double h_x = 0.0;
  double h_z1 = 0.0;
  double h_z2 = 0.0;

  int mx() const { return n_x + 2; }  // total plate nodes incl. endpoints
  double x(int i) const { return i * h_x; }
  double eta(int j) const { return j * h_z1; }
  double zeta(int k) const { return k * h_z2; }
};

Grid build_grid(int n_x, int n_z1, int n_z2);

// Nodal deflection on the plate grid (all mx() nodes, endpoints included).
// Construction enforces the obstacle bound u >= -1, the configured ceiling
// u < u_max, and finiteness. The pinned-endpoint condition u(0)=u(1)=0 is a
// property of dynamics states, checked by require_pinned() on those paths;
// the electrostatic solvers accept any admissible deflection (the boundary
// data b is built from u(x) pointwise).
class DeflectionField {
 public:
  DeflectionField() = default;
  // `lower` relaxes the obstacle bound for penalty-mode dynamics states,
  // which may undershoot -1 by the documented overshoot margin.
  DeflectionField(std::vector<double> values, double u_max = 4.0, double lower = -1.0);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  double min() const;
  double max() const;

  // Throws InvalidArgument unless both endpoint values vanish.
  void require_pinned() const;

 private:
  std::vector<double> values_;
};

// Flat plate helper used all over the tests.
DeflectionField flat_deflection(const Grid& grid, double level, double u_max = 4.0);

// u(x) = amp * sin(k pi x) sampled on the plate grid.
DeflectionField sine_deflection(const Grid& grid, double amp, int k = 1, double u_max = 4.0);

}  // namespace memsx
