#include "memsx/grid.hpp"

#include <cmath>
#include <utility>

namespace memsx {

Grid build_grid(int n_x, int n_z1, int n_z2) {
  if (n_x < 4 || n_z1 < 4 || n_z2 < 4)
    throw InvalidArgument("build_grid: all node counts must be >= 4");
  Grid g;
  g.n_x = n_x;
  g.n_z1 = n_z1;
  g.n_z2 = n_z2;
  g.h_x = 1.0 / (n_x + 1);
  g.h_z1 = 1.0 / (n_z1 - 1);
  g.h_z2 = 1.0 / (n_z2 - 1);
  return g;
}

DeflectionField::DeflectionField(std::vector<double> values, double u_max, double lower)
    : values_(std::move(values)) {
  if (values_.size() < 4) throw InvalidArgument("DeflectionField: too few nodes");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("DeflectionField: non-finite value");
    if (v < lower) throw InvalidArgument("DeflectionField: obstacle bound u >= -1 violated");
    if (v >= u_max) throw InvalidArgument("DeflectionField: value exceeds u_max");
  }
}

double DeflectionField::min() const {
  double m = values_[0];
  for (double v : values_) m = std::min(m, v);
  return m;
}

double DeflectionField::max() const {
  double m = values_[0];
  for (double v : values_) m = std::max(m, v);
  return m;
}

void DeflectionField::require_pinned() const {
  if (values_.front() != 0.0 || values_.back() != 0.0)
    throw InvalidArgument("DeflectionField: endpoints must vanish on dynamics paths");
}

DeflectionField flat_deflection(const Grid& grid, double level, double u_max) {
  return DeflectionField(std::vector<double>(grid.mx(), level), u_max);
}

DeflectionField sine_deflection(const Grid& grid, double amp, int k, double u_max) {
  std::vector<double> v(grid.mx());
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < grid.mx(); ++i) v[i] = amp * std::sin(k * pi * grid.x(i));
  v.front() = 0.0;
  v.back() = 0.0;
  return DeflectionField(std::move(v), u_max);
}

}  // namespace memsx
