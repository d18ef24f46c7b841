#pragma once

#include <string>
#include <vector>

#include "memsx/errors.hpp"
#include "memsx/grid.hpp"

namespace memsx {

enum class ProfileFamily { Constant, Affine, Separable };

// Rescaled plate permittivity sigma_*(x, s) on D x [0, delta], in units of
// the gap permittivity (sigma_1 normalized to 1). Only parametric families
// are supported so that configs stay reproducible:
//   Constant:  sigma_*(x,s) = a0
//   Affine:    sigma_*(x,s) = a0 + as*s
//   Separable: sigma_*(x,s) = a0 * (1 + ax*cos(pi x)) * (1 + as*s)
// The vertical derivative d sigma_*/ds is analytic per family.
class PermittivityProfile {
 public:
  PermittivityProfile() = default;
  // sigma0 is the declared positive lower bound; construction spot-checks it
  // (and the declared flags) on a sample lattice over D x [0, s_check].
  PermittivityProfile(ProfileFamily family, double a0, double ax, double as,
                      double sigma0, double s_check = 1.0);

  static PermittivityProfile constant(double value);
  static PermittivityProfile affine(double a0, double slope);
  static PermittivityProfile separable(double a0, double ax, double as);

  double eval(double x, double s) const;  // no argument checks (hot path)
  double ds(double x, double s) const;    // analytic d/ds

  double sigma0() const { return sigma0_; }
  bool constant_in_s() const { return constant_in_s_; }
  bool nondecreasing_in_s() const { return nondecreasing_in_s_; }
  bool ge_one() const { return ge_one_; }

  // Returns a copy whose values are scaled by `factor` (used by the O(d)
  // thin-layer scaling, where the layer permittivity is delta*sigma_*).
  PermittivityProfile scaled(double factor) const;

 private:
  ProfileFamily family_ = ProfileFamily::Constant;
  double a0_ = 1.0, ax_ = 0.0, as_ = 0.0;
  double sigma0_ = 1.0;
  bool constant_in_s_ = true;
  bool nondecreasing_in_s_ = true;
  bool ge_one_ = true;
};

// sigma_*(x,s) with domain checks: x in [0,1], s >= 0 and finite.
double eval_permittivity(const PermittivityProfile& profile, double x, double s);

// N_delta(x) = int_0^delta dq / sigma_*(x,q) at every plate node, by
// composite Simpson with `quad_points` sample points (rounded up to odd).
// Exact for constant profiles; identically zero when delta = 0.
std::vector<double> n_delta(const PermittivityProfile& profile, const Grid& grid,
                            double delta, int quad_points = 33);

// Single-point version of the same quadrature.
double n_delta_at(const PermittivityProfile& profile, double x, double delta,
                  int quad_points = 33);

}  // namespace memsx
