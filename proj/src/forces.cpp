#include "memsx/forces.hpp"

#include <cfloat>
#include <cmath>

#include "memsx/rng.hpp"

namespace memsx {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Second-order first derivative on a uniform line, one-sided at the ends.
double dline(const std::vector<double>& f, int i, int n, double h) {
  if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  if (i == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return (f[i + 1] - f[i - 1]) / (2.0 * h);
}

std::vector<double> nodal_slope(const DeflectionField& u, const Grid& grid) {
  std::vector<double> up(grid.mx());
  for (int i = 0; i < grid.mx(); ++i) up[i] = dline(u.values(), i, grid.mx(), grid.h_x);
  return up;
}

// Mapped-coordinate derivative tables for one layer: px(i,k) along x at
// fixed vertical index, pv(i,k) along the vertical coordinate.
struct DerivTables {
  int mx, nv;
  std::vector<double> px, pv;
  double dx(int i, int k) const { return px[static_cast<std::size_t>(i) * nv + k]; }
  double dv(int i, int k) const { return pv[static_cast<std::size_t>(i) * nv + k]; }
};

template <typename ValFn>
DerivTables derivative_tables(int mx, int nv, double hx, double hv, ValFn val) {
  DerivTables t;
  t.mx = mx;
  t.nv = nv;
  t.px.resize(static_cast<std::size_t>(mx) * nv);
  t.pv.resize(static_cast<std::size_t>(mx) * nv);
  std::vector<double> row(mx), col(nv);
  for (int k = 0; k < nv; ++k) {
    for (int i = 0; i < mx; ++i) row[i] = val(i, k);
    for (int i = 0; i < mx; ++i)
      t.px[static_cast<std::size_t>(i) * nv + k] = dline(row, i, mx, hx);
  }
  for (int i = 0; i < mx; ++i) {
    for (int k = 0; k < nv; ++k) col[k] = val(i, k);
    for (int k = 0; k < nv; ++k)
      t.pv[static_cast<std::size_t>(i) * nv + k] = dline(col, k, nv, hv);
  }
  return t;
}

void require_tag(const PotentialSolution& sol, PotentialModel model, const DeflectionField& u,
                 const char* who) {
  if (sol.model != model) throw InvalidArgument(std::string(who) + ": solution tag mismatch");
  if (sol.grid.mx() != u.size())
    throw InvalidArgument(std::string(who) + ": solution grid does not match u");
}

double trapz(const std::vector<double>& f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace

TransmissionForceParts transmission_force_parts(const PotentialSolution& sol,
                                                const DeflectionField& u,
                                                const PermittivityProfile& profile,
                                                const ModelParams& params) {
  (void)params;
  require_tag(sol, PotentialModel::Transmission, u, "force_transmission");
  const Grid& grid = sol.grid;
  const int mx = grid.mx(), nz2 = grid.n_z2;
  const double delta = sol.delta, eps = sol.eps;
  const double e2 = eps * eps;
  const std::vector<double> up = nodal_slope(u, grid);

  auto val2 = [&](int i, int k) { return sol.p2(i, k); };
  const DerivTables t = derivative_tables(mx, nz2, grid.h_x, grid.h_z2, val2);

  TransmissionForceParts parts;
  parts.heterogeneity.assign(mx, 0.0);
  parts.top.assign(mx, 0.0);
  parts.jump_tangential.assign(mx, 0.0);
  parts.jump_normal.assign(mx, 0.0);

  std::vector<double> integrand(nz2);
  for (int i = 0; i < mx; ++i) {
    const double x = grid.x(i);
    const double upi = up[i];

    // physical derivatives of psi2 at each zeta level
    auto phys = [&](int k, double& px, double& pz) {
      pz = t.dv(i, k) / delta;
      px = t.dx(i, k) - upi / delta * t.dv(i, k);
    };

    if (!profile.constant_in_s()) {
      for (int k = 0; k < nz2; ++k) {
        double px, pz;
        phys(k, px, pz);
        integrand[k] = profile.ds(x, delta * grid.zeta(k)) * (e2 * px * px + pz * pz);
      }
      parts.heterogeneity[i] = 0.5 * delta * trapz(integrand, grid.h_z2);
    }

    double pxT, pzT;
    phys(nz2 - 1, pxT, pzT);
    parts.top[i] = 0.5 * profile.eval(x, delta) * (e2 * pxT * pxT + pzT * pzT);

    double px0, pz0;
    phys(0, px0, pz0);
    const double s0 = profile.eval(x, 0.0);
    const double denom = 1.0 + e2 * upi * upi;
    const double tang = pz0 * upi + px0;
    parts.jump_tangential[i] = 0.5 * (s0 - 1.0) / denom * e2 * tang * tang;
    const double norm = pz0 - e2 * upi * px0;
    parts.jump_normal[i] = 0.5 * (s0 - 1.0) * s0 / denom * norm * norm;
  }
  return parts;
}

ForceField force_transmission(const PotentialSolution& sol, const DeflectionField& u,
                              const PermittivityProfile& profile, const ModelParams& params) {
  const TransmissionForceParts p = transmission_force_parts(sol, u, profile, params);
  ForceField f;
  f.model = PotentialModel::Transmission;
  f.g.resize(p.top.size());
  for (std::size_t i = 0; i < f.g.size(); ++i)
    f.g[i] = p.heterogeneity[i] + p.top[i] + p.jump_tangential[i] + p.jump_normal[i];
  return f;
}

ForceField force_pelesko(const PotentialSolution& sol, const DeflectionField& u,
                         const PermittivityProfile& profile, const ModelParams& params) {
  const TransmissionForceParts p = transmission_force_parts(sol, u, profile, params);
  ForceField f;
  f.model = PotentialModel::Transmission;
  f.g = p.top;
  return f;
}

ForceField force_membrane(const PotentialSolution& sol, const DeflectionField& u,
                          const ModelParams& params) {
  (void)params;
  require_tag(sol, PotentialModel::Membrane, u, "force_membrane");
  const Grid& grid = sol.grid;
  const int mx = grid.mx(), nz1 = grid.n_z1;
  const double e2 = sol.eps * sol.eps;
  const std::vector<double> up = nodal_slope(u, grid);

  auto val1 = [&](int i, int j) { return sol.p1(i, j); };
  const DerivTables t = derivative_tables(mx, nz1, grid.h_x, grid.h_z1, val1);

  ForceField f;
  f.model = PotentialModel::Membrane;
  f.g.assign(mx, 0.0);
  for (int i = 0; i < mx; ++i) {
    const double w = 1.0 + u[i];
    const double deta = t.dv(i, nz1 - 1);
    const double pz = deta / w;
    const double px = t.dx(i, nz1 - 1) - up[i] / w * deta;  // eta=1 trace
    f.g[i] = 0.5 * (e2 * px * px + pz * pz);
  }
  return f;
}

ForceField force_robin(const PotentialSolution& sol, const DeflectionField& u,
                       const PermittivityProfile& profile, const ModelParams& params) {
  (void)params;
  require_tag(sol, PotentialModel::Robin, u, "force_robin");
  const Grid& grid = sol.grid;
  const int mx = grid.mx(), nz1 = grid.n_z1;
  const double e2 = sol.eps * sol.eps;
  const std::vector<double> up = nodal_slope(u, grid);

  auto val1 = [&](int i, int j) { return sol.p1(i, j); };
  const DerivTables t = derivative_tables(mx, nz1, grid.h_x, grid.h_z1, val1);

  std::vector<double> flux(mx);
  for (int i = 0; i < mx; ++i) {
    const double trace = sol.p1(i, nz1 - 1) - 1.0;
    flux[i] = profile.eval(grid.x(i), 0.0) * trace * trace * up[i];
  }

  ForceField f;
  f.model = PotentialModel::Robin;
  f.g.assign(mx, 0.0);
  for (int i = 0; i < mx; ++i) {
    const double w = 1.0 + u[i];
    const double deta = t.dv(i, nz1 - 1);
    const double pz = deta / w;
    const double px = t.dx(i, nz1 - 1) - up[i] / w * deta;
    const double s0 = profile.eval(grid.x(i), 0.0);
    const double trace = sol.p1(i, nz1 - 1) - 1.0;
    const double div_term = e2 * dline(flux, i, mx, grid.h_x);
    f.g[i] = -0.5 * e2 * px * px - 0.5 * pz * pz -
             s0 * (1.0 + e2 * up[i] * up[i]) * trace * pz + div_term;
  }
  return f;
}

ForceField force_reduced(const DeflectionField& u, const std::vector<double>& n_field,
                         const ModelParams& params) {
  (void)params;
  if (n_field.size() != static_cast<std::size_t>(u.size()))
    throw InvalidArgument("force_reduced: N field size mismatch");
  ForceField f;
  f.model = PotentialModel::Transmission;
  f.g.resize(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const double den = 1.0 + u[i] + n_field[i];
    if (den <= 1.0e-12) throw SingularForce("force_reduced: 1+u+N vanished at a node");
    f.g[i] = 0.5 / (den * den);
  }
  return f;
}

std::vector<double> force_reduced_derivative(const DeflectionField& u,
                                             const std::vector<double>& n_field) {
  std::vector<double> d(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const double den = 1.0 + u[i] + n_field[i];
    if (den <= 1.0e-12) throw SingularForce("force_reduced_derivative: 1+u+N vanished");
    d[i] = -1.0 / (den * den * den);
  }
  return d;
}

ShapeDerivativeReport validate_shape_derivative(const DeflectionField& u,
                                                const std::vector<double>& v,
                                                PotentialModel model,
                                                const PermittivityProfile& profile,
                                                const ModelParams& params, const Grid& grid,
                                                double step) {
  if (!(step > 0.0)) throw InvalidArgument("validate_shape_derivative: step must be > 0");
  if (v.size() != static_cast<std::size_t>(grid.mx()))
    throw InvalidArgument("validate_shape_derivative: v size mismatch");
  if (v.front() != 0.0 || v.back() != 0.0)
    throw InvalidArgument("validate_shape_derivative: v must vanish at the endpoints");

  auto perturb = [&](double s) {
    std::vector<double> w(u.values());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += s * v[i];
    try {
      return DeflectionField(std::move(w), params.u_max);
    } catch (const InvalidArgument&) {
      throw DegenerateDomain("validate_shape_derivative: perturbed deflection inadmissible");
    }
  };

  auto solve = [&](const DeflectionField& w) {
    switch (model) {
      case PotentialModel::Transmission: return solve_transmission(w, profile, params, grid);
      case PotentialModel::Membrane: return solve_membrane(w, params, grid);
      case PotentialModel::Robin: return solve_robin(w, profile, params, grid);
    }
    throw InvalidArgument("validate_shape_derivative: unknown model");
  };

  const PotentialSolution sol0 = solve(u);
  const PotentialSolution sol_p = solve(perturb(step));
  const PotentialSolution sol_m = solve(perturb(-step));

  ForceField f;
  switch (model) {
    case PotentialModel::Transmission: f = force_transmission(sol0, u, profile, params); break;
    case PotentialModel::Membrane: f = force_membrane(sol0, u, params); break;
    case PotentialModel::Robin: f = force_robin(sol0, u, profile, params); break;
  }

  std::vector<double> gv(grid.mx());
  for (int i = 0; i < grid.mx(); ++i) gv[i] = f.g[i] * v[i];

  ShapeDerivativeReport rep;
  rep.step = step;
  rep.energy = sol0.energy;
  rep.analytic = trapz(gv, grid.h_x);
  rep.fd_centered = (sol_p.energy - sol_m.energy) / (2.0 * step);
  rep.fd_plus = (sol_p.energy - sol0.energy) / step;
  rep.fd_minus = (sol0.energy - sol_m.energy) / step;
  rep.rel_err = std::fabs(rep.analytic - rep.fd_centered) /
                std::max(std::fabs(rep.fd_centered), DBL_EPSILON);
  return rep;
}

std::vector<double> seeded_test_field(const Grid& grid, std::uint64_t seed, double scale) {
  // seeded mix over sin(k pi x), k <= 4; every draw keeps a nonzero k=1
  // component so the derivative never degenerates by symmetry
  SplitMix64 rng(seed);
  double amp[4];
  for (int k = 0; k < 4; ++k) {
    const double mag = (k == 0 ? 0.5 + 0.5 * rng.uniform01() : rng.uniform01()) / (k + 1.0);
    const double sign = (rng.next() & 1) ? 1.0 : -1.0;
    amp[k] = scale * sign * mag;
  }
  std::vector<double> v(grid.mx());
  for (int i = 0; i < grid.mx(); ++i) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += amp[k] * std::sin((k + 1) * kPi * grid.x(i));
    v[i] = s;
  }
  v.front() = 0.0;
  v.back() = 0.0;
  return v;
}

}  // namespace memsx
