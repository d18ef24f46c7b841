#include "memsx/permittivity.hpp"

#include <cmath>

namespace memsx {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PermittivityProfile::PermittivityProfile(ProfileFamily family, double a0, double ax, double as,
                                         double sigma0, double s_check)
    : family_(family), a0_(a0), ax_(ax), as_(as), sigma0_(sigma0) {
  if (sigma0_ <= 0.0) throw InvalidProfile("PermittivityProfile: sigma0 must be > 0");

  constant_in_s_ = true;
  nondecreasing_in_s_ = true;
  ge_one_ = true;
  const int nx = 17, ns = 17;
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ns; ++j) {
      const double x = static_cast<double>(i) / nx;
      const double s = s_check * static_cast<double>(j) / ns;
      const double v = eval(x, s);
      if (!(v >= sigma0_))
        throw InvalidProfile("PermittivityProfile: sampled value below declared sigma0");
      if (v < 1.0) ge_one_ = false;
      const double d = ds(x, s);
      if (d != 0.0) constant_in_s_ = false;
      if (d < 0.0) nondecreasing_in_s_ = false;
    }
  }
}

PermittivityProfile PermittivityProfile::constant(double value) {
  return PermittivityProfile(ProfileFamily::Constant, value, 0.0, 0.0, value);
}

PermittivityProfile PermittivityProfile::affine(double a0, double slope) {
  const double lower = slope >= 0.0 ? a0 : a0 + slope;  // over [0,1]
  return PermittivityProfile(ProfileFamily::Affine, a0, 0.0, slope, lower);
}

PermittivityProfile PermittivityProfile::separable(double a0, double ax, double as) {
  double lower = a0 * (1.0 - std::fabs(ax));
  if (as < 0.0) lower *= 1.0 + as;
  return PermittivityProfile(ProfileFamily::Separable, a0, ax, as, lower);
}

double PermittivityProfile::eval(double x, double s) const {
  switch (family_) {
    case ProfileFamily::Constant:
      return a0_;
    case ProfileFamily::Affine:
      return a0_ + as_ * s;
    case ProfileFamily::Separable:
      return a0_ * (1.0 + ax_ * std::cos(kPi * x)) * (1.0 + as_ * s);
  }
  return a0_;
}

double PermittivityProfile::ds(double x, double s) const {
  (void)s;
  switch (family_) {
    case ProfileFamily::Constant:
      return 0.0;
    case ProfileFamily::Affine:
      return as_;
    case ProfileFamily::Separable:
      return a0_ * (1.0 + ax_ * std::cos(kPi * x)) * as_;
  }
  return 0.0;
}

PermittivityProfile PermittivityProfile::scaled(double factor) const {
  if (factor <= 0.0) throw InvalidProfile("PermittivityProfile::scaled: factor must be > 0");
  PermittivityProfile p(*this);
  p.a0_ *= factor;
  p.sigma0_ *= factor;
  p.ge_one_ = true;  // re-derive conservatively below
  const int nx = 9, ns = 9;
  for (int i = 0; i <= nx && p.ge_one_; ++i)
    for (int j = 0; j <= ns; ++j)
      if (p.eval(static_cast<double>(i) / nx, static_cast<double>(j) / ns) < 1.0) {
        p.ge_one_ = false;
        break;
      }
  return p;
}

double eval_permittivity(const PermittivityProfile& profile, double x, double s) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("eval_permittivity: x outside [0,1]");
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("eval_permittivity: s must be >= 0");
  const double v = profile.eval(x, s);
  if (!(v > 0.0)) throw InvalidProfile("eval_permittivity: nonpositive permittivity sampled");
  return v;
}

double n_delta_at(const PermittivityProfile& profile, double x, double delta, int quad_points) {
  if (delta < 0.0) throw InvalidArgument("n_delta: delta must be >= 0");
  if (delta == 0.0) return 0.0;
  if (quad_points < 2) throw InvalidArgument("n_delta: quad_points must be >= 2");
  int n = quad_points;
  if (n % 2 == 0) ++n;  // composite Simpson wants an odd node count
  const int panels = n - 1;
  const double h = delta / panels;
  double sum = 0.0;
  for (int j = 0; j <= panels; ++j) {
    const double s = j * h;
    const double v = profile.eval(x, s);
    if (!(v > 0.0)) throw InvalidProfile("n_delta: nonpositive permittivity sampled");
    double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += w / v;
  }
  return sum * h / 3.0;
}

std::vector<double> n_delta(const PermittivityProfile& profile, const Grid& grid, double delta,
                            int quad_points) {
  std::vector<double> out(grid.mx());
  for (int i = 0; i < grid.mx(); ++i) out[i] = n_delta_at(profile, grid.x(i), delta, quad_points);
  return out;
}

}  // namespace memsx
