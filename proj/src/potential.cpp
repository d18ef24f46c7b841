#include "memsx/potential.hpp"

#include <cmath>
#include <cstddef>

namespace memsx {

namespace {

// Bilinear element matrices on a hx-by-hy rectangle, node order
// [00, 10, 01, 11]; exact for constant coefficients.
const double kM1[4][4] = {{2, -2, 1, -1}, {-2, 2, -1, 1}, {1, -1, 2, -2}, {-1, 1, -2, 2}};
const double kM2[4][4] = {{2, 1, -2, -1}, {1, 2, -1, -2}, {-2, -1, 2, 1}, {-1, -2, 1, 2}};
const double kS[4][4] = {{1, 0, 0, -1}, {0, -1, 1, 0}, {0, 1, -1, 0}, {-1, 0, 0, 1}};

struct ElementMatrix {
  double k[4][4];
};

// Quadratic form a11 px^2 + 2 a12 px py + a22 py^2 integrated exactly.
ElementMatrix element_stiffness(double a11, double a12, double a22, double hx, double hy) {
  ElementMatrix e;
  const double cxx = a11 * hy / (6.0 * hx);
  const double cyy = a22 * hx / (6.0 * hy);
  const double cxy = 0.5 * a12;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) e.k[a][b] = cxx * kM1[a][b] + cyy * kM2[a][b] + cxy * kS[a][b];
  return e;
}

struct NodeRef {
  int dof = -1;       // >= 0 for unknowns
  double value = 0.0; // Dirichlet data otherwise
};

double simpson_inv_sigma(const PermittivityProfile& profile, double x, double s0, double s1,
                         int quad_points) {
  if (s1 <= s0) return 0.0;
  int n = quad_points < 3 ? 3 : quad_points;
  if (n % 2 == 0) ++n;
  const int panels = n - 1;
  const double h = (s1 - s0) / panels;
  double sum = 0.0;
  for (int j = 0; j <= panels; ++j) {
    const double v = profile.eval(x, s0 + j * h);
    if (!(v > 0.0)) throw InvalidProfile("potential: nonpositive permittivity sampled");
    const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += w / v;
  }
  return sum * h / 3.0;
}

// Node classification and numbering. Unknown columns are i = 1..n_x; slots
// inside a column are ordered bottom-up through layer 1, then through layer
// 2, so the bandwidth of the assembled system is one column block.
struct Discretization {
  PotentialModel model;
  Grid grid;
  double delta = 0.0, eps = 0.0;
  std::vector<NodeRef> layer1;  // mx*n_z1
  std::vector<NodeRef> layer2;  // mx*n_z2 (transmission only)
  int ndof = 0;
  int band = 0;

  const NodeRef& n1(int i, int j) const {
    return layer1[static_cast<std::size_t>(i) * grid.n_z1 + j];
  }
  const NodeRef& n2(int i, int k) const {
    return layer2[static_cast<std::size_t>(i) * grid.n_z2 + k];
  }
};

// Lateral Dirichlet closure: the per-column layered profile built from
// u(x_side) and sigma_*(x_side, .). It coincides with (1+z)/(1+u+delta)
// when sigma_* is 1, keeps flat-plate solutions exactly separable for any
// sigma_*, and its thin-plate limits are exactly the membrane/Robin side
// data, so the limit studies compare discretizations with matching closures.
Discretization discretize(PotentialModel model, const DeflectionField& u, const Grid& grid,
                          double delta, double eps, const PermittivityProfile& profile,
                          int quad_points) {
  Discretization d;
  d.model = model;
  d.grid = grid;
  d.delta = delta;
  d.eps = eps;
  const int mx = grid.mx(), nz1 = grid.n_z1, nz2 = grid.n_z2;
  d.layer1.resize(static_cast<std::size_t>(mx) * nz1);
  if (model == PotentialModel::Transmission)
    d.layer2.resize(static_cast<std::size_t>(mx) * nz2);

  int slots = 0;
  switch (model) {
    case PotentialModel::Transmission: slots = (nz1 - 1) + (nz2 - 2); break;
    case PotentialModel::Membrane: slots = nz1 - 2; break;
    case PotentialModel::Robin: slots = nz1 - 1; break;
  }
  d.band = slots + 1;
  d.ndof = grid.n_x * slots;

  auto dof1 = [&](int i, int j) { return (i - 1) * slots + (j - 1); };
  auto dof2 = [&](int i, int k) { return (i - 1) * slots + (nz1 - 2) + k; };

  for (int i = 0; i < mx; ++i) {
    const bool side = (i == 0 || i == mx - 1);
    const double w = 1.0 + u[i];
    double gap_inv = 0.0;  // 1 / (w + N) of the side column
    if (side) {
      switch (model) {
        case PotentialModel::Transmission:
          gap_inv = 1.0 / (w + simpson_inv_sigma(profile, grid.x(i), 0.0, delta, quad_points));
          break;
        case PotentialModel::Membrane:
          gap_inv = 1.0 / w;
          break;
        case PotentialModel::Robin:
          gap_inv = 1.0 / (w + 1.0 / profile.eval(grid.x(i), 0.0));
          break;
      }
    }
    for (int j = 0; j < nz1; ++j) {
      NodeRef& ref = d.layer1[static_cast<std::size_t>(i) * nz1 + j];
      if (j == 0) {
        ref = {-1, 0.0};
      } else if (model == PotentialModel::Membrane && j == nz1 - 1) {
        ref = {-1, 1.0};
      } else if (side) {
        ref = {-1, grid.eta(j) * w * gap_inv};
      } else {
        ref = {dof1(i, j), 0.0};
      }
    }
    if (model == PotentialModel::Transmission) {
      for (int k = 0; k < nz2; ++k) {
        NodeRef& ref = d.layer2[static_cast<std::size_t>(i) * nz2 + k];
        if (k == 0) {
          ref = d.n1(i, nz1 - 1);  // shared interface node
        } else if (k == nz2 - 1) {
          ref = {-1, 1.0};
        } else if (side) {
          const double tail =
              simpson_inv_sigma(profile, grid.x(i), delta * grid.zeta(k), delta, quad_points);
          ref = {-1, 1.0 - gap_inv * tail};
        } else {
          ref = {dof2(i, k), 0.0};
        }
      }
    }
  }
  return d;
}

double u_center(const DeflectionField& u, int i) { return 0.5 * (u[i] + u[i + 1]); }

// Element coefficient callback: fills (a11, a12, a22) for an element with
// x-range [i, i+1] and vertical index je.
struct LayerCoeffs {
  double a11, a12, a22;
};

LayerCoeffs layer1_coeffs(const DeflectionField& u, const Grid& grid, double eps, int i, int je) {
  const double wc = 1.0 + u_center(u, i);
  const double upc = (u[i + 1] - u[i]) / grid.h_x;
  const double etac = (grid.eta(je) + grid.eta(je + 1)) * 0.5;
  LayerCoeffs c;
  c.a11 = eps * eps * wc;
  c.a12 = -eps * eps * etac * upc;
  c.a22 = (1.0 + eps * eps * etac * etac * upc * upc) / wc;
  return c;
}

LayerCoeffs layer2_coeffs(const DeflectionField& u, const PermittivityProfile& profile,
                          const Grid& grid, double eps, double delta, int i, int ke) {
  const double xc = (grid.x(i) + grid.x(i + 1)) * 0.5;
  const double upc = (u[i + 1] - u[i]) / grid.h_x;
  const double zetac = (grid.zeta(ke) + grid.zeta(ke + 1)) * 0.5;
  const double sc = profile.eval(xc, delta * zetac);
  if (!(sc > 0.0)) throw InvalidProfile("solve_transmission: nonpositive permittivity sampled");
  LayerCoeffs c;
  c.a11 = sc * delta * eps * eps;
  c.a12 = -sc * eps * eps * upc;
  c.a22 = sc * (1.0 + eps * eps * upc * upc) / delta;
  return c;
}

double robin_mass_coeff(const DeflectionField& u, const PermittivityProfile& profile,
                        const Grid& grid, double eps, int i) {
  const double xc = (grid.x(i) + grid.x(i + 1)) * 0.5;
  const double upc = (u[i + 1] - u[i]) / grid.h_x;
  const double s0 = profile.eval(xc, 0.0);
  if (!(s0 > 0.0)) throw InvalidProfile("solve_robin: nonpositive sigma_*(x,0) sampled");
  return s0 * (1.0 + eps * eps * upc * upc);
}

// Assembles K and the eliminated-boundary RHS over one layer.
template <typename CoeffFn, typename RefFn>
void assemble_layer(const Grid& grid, int nz, double hz, CoeffFn coeffs, RefFn ref,
                    CsrMatrix& K, std::vector<double>& rhs) {
  const int mx = grid.mx();
  for (int i = 0; i < mx - 1; ++i) {
    for (int je = 0; je < nz - 1; ++je) {
      const LayerCoeffs c = coeffs(i, je);
      const ElementMatrix e = element_stiffness(c.a11, c.a12, c.a22, grid.h_x, hz);
      const NodeRef nodes[4] = {ref(i, je), ref(i + 1, je), ref(i, je + 1), ref(i + 1, je + 1)};
      for (int a = 0; a < 4; ++a) {
        if (nodes[a].dof < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (nodes[b].dof >= 0)
            K.add(nodes[a].dof, nodes[b].dof, e.k[a][b]);
          else
            rhs[nodes[a].dof] -= e.k[a][b] * nodes[b].value;
        }
      }
    }
  }
}

// Energy of one layer evaluated on the full nodal field.
template <typename CoeffFn, typename ValFn>
double layer_energy(const Grid& grid, int nz, double hz, CoeffFn coeffs, ValFn val) {
  const int mx = grid.mx();
  double total = 0.0;
  for (int i = 0; i < mx - 1; ++i) {
    for (int je = 0; je < nz - 1; ++je) {
      const LayerCoeffs c = coeffs(i, je);
      const ElementMatrix e = element_stiffness(c.a11, c.a12, c.a22, grid.h_x, hz);
      const double p[4] = {val(i, je), val(i + 1, je), val(i, je + 1), val(i + 1, je + 1)};
      double q = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) q += p[a] * e.k[a][b] * p[b];
      total += q;
    }
  }
  return total;
}

void check_gap(const DeflectionField& u, const ModelParams& params, const char* who) {
  if (!(u.min() >= -1.0 + params.gap_tol))
    throw DegenerateDomain(std::string(who) + ": min(u) below -1 + gap_tol");
}

void check_near_max_principle(const std::vector<double>& psi, const char* who) {
  for (double v : psi)
    if (!(v >= -0.05 && v <= 1.05))
      throw SolverFailure(std::string(who) + ": near-maximum principle violated, psi=" +
                              std::to_string(v),
                          0.0, 0);
}

void solve_linear(const Discretization& d, CsrMatrix& K, std::vector<double>& rhs,
                  const ModelParams& params, std::vector<double>& x, PotentialSolution& sol) {
  K.finalize();
  if (params.backend == LinearBackend::Direct) {
    BandedMatrix B(d.ndof, d.band, d.band);
    const auto& rp = K.rowptr();
    const auto& ci = K.colind();
    const auto& vv = K.values();
    for (int i = 0; i < d.ndof; ++i)
      for (int k = rp[i]; k < rp[i + 1]; ++k) B.at(i, ci[k]) = vv[k];
    B.factorize();
    x = rhs;
    B.solve(x);
    sol.iterations = 0;
    sol.residual = 0.0;
  } else {
    const PcgReport rep = pcg_solve(K, rhs, x, params.tol_linear);
    sol.iterations = rep.iterations;
    sol.residual = rep.residual;
  }
}

double trapz_plate(const Grid& grid, const std::vector<double>& f) {
  double s = 0.5 * (f.front() + f.back());
  for (int i = 1; i < grid.mx() - 1; ++i) s += f[i];
  return s * grid.h_x;
}

}  // namespace

double reduced_energy(const DeflectionField& u, const std::vector<double>& n_field,
                      const Grid& grid) {
  std::vector<double> f(grid.mx());
  for (int i = 0; i < grid.mx(); ++i) {
    const double den = 1.0 + u[i] + n_field[i];
    if (!(den > 0.0)) throw SingularForce("reduced_energy: 1+u+N not positive");
    f[i] = -0.5 / den;
  }
  return trapz_plate(grid, f);
}

PotentialSolution solve_membrane(const DeflectionField& u, const ModelParams& params,
                                 const Grid& grid) {
  if (u.size() != grid.mx()) throw InvalidArgument("solve_membrane: u/grid size mismatch");
  check_gap(u, params, "solve_membrane");

  PotentialSolution sol;
  sol.model = PotentialModel::Membrane;
  sol.grid = grid;
  sol.delta = 0.0;
  sol.eps = params.eps;
  const int mx = grid.mx(), nz1 = grid.n_z1;
  sol.psi1.assign(static_cast<std::size_t>(mx) * nz1, 0.0);

  if (params.eps == 0.0) {
    // b_u is (1+z)/(1+u); in the mapped coordinate that is psi = eta.
    std::vector<double> f(mx);
    for (int i = 0; i < mx; ++i) {
      for (int j = 0; j < nz1; ++j) sol.psi1[static_cast<std::size_t>(i) * nz1 + j] = grid.eta(j);
      f[i] = -0.5 / (1.0 + u[i]);
    }
    sol.energy = trapz_plate(grid, f);
    return sol;
  }

  static const PermittivityProfile unit = PermittivityProfile::constant(1.0);
  Discretization d =
      discretize(PotentialModel::Membrane, u, grid, 0.0, params.eps, unit, params.quad_points);
  CsrMatrix K(d.ndof);
  std::vector<double> rhs(d.ndof, 0.0);
  auto coeffs = [&](int i, int je) { return layer1_coeffs(u, grid, params.eps, i, je); };
  auto ref = [&](int i, int j) { return d.n1(i, j); };
  assemble_layer(grid, nz1, grid.h_z1, coeffs, ref, K, rhs);

  std::vector<double> x;
  solve_linear(d, K, rhs, params, x, sol);

  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < nz1; ++j) {
      const NodeRef& r = d.n1(i, j);
      sol.psi1[static_cast<std::size_t>(i) * nz1 + j] = r.dof >= 0 ? x[r.dof] : r.value;
    }
  check_near_max_principle(sol.psi1, "solve_membrane");

  auto val = [&](int i, int j) { return sol.p1(i, j); };
  sol.energy = -0.5 * layer_energy(grid, nz1, grid.h_z1, coeffs, val);
  return sol;
}

PotentialSolution solve_transmission(const DeflectionField& u, const PermittivityProfile& profile,
                                     const ModelParams& params, const Grid& grid) {
  if (u.size() != grid.mx()) throw InvalidArgument("solve_transmission: u/grid size mismatch");
  if (params.delta == 0.0) return solve_membrane(u, params, grid);
  check_gap(u, params, "solve_transmission");

  PotentialSolution sol;
  sol.model = PotentialModel::Transmission;
  sol.grid = grid;
  sol.delta = params.delta;
  sol.eps = params.eps;
  const int mx = grid.mx(), nz1 = grid.n_z1, nz2 = grid.n_z2;
  const double delta = params.delta;
  sol.psi1.assign(static_cast<std::size_t>(mx) * nz1, 0.0);
  sol.psi2.assign(static_cast<std::size_t>(mx) * nz2, 0.0);

  if (params.eps == 0.0) {
    // Separable closed form: psi1 = A(x)(1+z), psi2 integrates 1/sigma_*.
    std::vector<double> f(mx);
    for (int i = 0; i < mx; ++i) {
      const double x = grid.x(i);
      const double w = 1.0 + u[i];
      const double nd = simpson_inv_sigma(profile, x, 0.0, delta, params.quad_points);
      const double A = 1.0 / (w + nd);
      for (int j = 0; j < nz1; ++j)
        sol.psi1[static_cast<std::size_t>(i) * nz1 + j] = A * grid.eta(j) * w;
      for (int k = 0; k < nz2; ++k) {
        const double tail =
            simpson_inv_sigma(profile, x, delta * grid.zeta(k), delta, params.quad_points);
        sol.psi2[static_cast<std::size_t>(i) * nz2 + k] = 1.0 - A * tail;
      }
      f[i] = -0.5 * A;
    }
    sol.energy = trapz_plate(grid, f);
    return sol;
  }

  Discretization d = discretize(PotentialModel::Transmission, u, grid, delta, params.eps,
                                profile, params.quad_points);
  CsrMatrix K(d.ndof);
  std::vector<double> rhs(d.ndof, 0.0);
  auto coeffs1 = [&](int i, int je) { return layer1_coeffs(u, grid, params.eps, i, je); };
  auto ref1 = [&](int i, int j) { return d.n1(i, j); };
  assemble_layer(grid, nz1, grid.h_z1, coeffs1, ref1, K, rhs);
  auto coeffs2 = [&](int i, int ke) {
    return layer2_coeffs(u, profile, grid, params.eps, delta, i, ke);
  };
  auto ref2 = [&](int i, int k) { return d.n2(i, k); };
  assemble_layer(grid, nz2, grid.h_z2, coeffs2, ref2, K, rhs);

  std::vector<double> x;
  solve_linear(d, K, rhs, params, x, sol);

  for (int i = 0; i < mx; ++i) {
    for (int j = 0; j < nz1; ++j) {
      const NodeRef& r = d.n1(i, j);
      sol.psi1[static_cast<std::size_t>(i) * nz1 + j] = r.dof >= 0 ? x[r.dof] : r.value;
    }
    for (int k = 0; k < nz2; ++k) {
      const NodeRef& r = d.n2(i, k);
      sol.psi2[static_cast<std::size_t>(i) * nz2 + k] = r.dof >= 0 ? x[r.dof] : r.value;
    }
  }
  check_near_max_principle(sol.psi1, "solve_transmission");
  check_near_max_principle(sol.psi2, "solve_transmission");

  auto val1 = [&](int i, int j) { return sol.p1(i, j); };
  auto val2 = [&](int i, int k) { return sol.p2(i, k); };
  sol.energy = -0.5 * (layer_energy(grid, nz1, grid.h_z1, coeffs1, val1) +
                       layer_energy(grid, nz2, grid.h_z2, coeffs2, val2));
  return sol;
}

PotentialSolution solve_robin(const DeflectionField& u, const PermittivityProfile& profile,
                              const ModelParams& params, const Grid& grid) {
  if (u.size() != grid.mx()) throw InvalidArgument("solve_robin: u/grid size mismatch");
  check_gap(u, params, "solve_robin");

  PotentialSolution sol;
  sol.model = PotentialModel::Robin;
  sol.grid = grid;
  sol.delta = 0.0;
  sol.eps = params.eps;
  const int mx = grid.mx(), nz1 = grid.n_z1;
  sol.psi1.assign(static_cast<std::size_t>(mx) * nz1, 0.0);

  if (params.eps == 0.0) {
    std::vector<double> f(mx);
    for (int i = 0; i < mx; ++i) {
      const double w = 1.0 + u[i];
      const double s0 = profile.eval(grid.x(i), 0.0);
      if (!(s0 > 0.0)) throw InvalidProfile("solve_robin: nonpositive sigma_*(x,0)");
      const double A = s0 / (1.0 + s0 * w);
      for (int j = 0; j < nz1; ++j)
        sol.psi1[static_cast<std::size_t>(i) * nz1 + j] = A * grid.eta(j) * w;
      f[i] = -0.5 / (w + 1.0 / s0);
    }
    sol.energy = trapz_plate(grid, f);
    return sol;
  }

  Discretization d =
      discretize(PotentialModel::Robin, u, grid, 0.0, params.eps, profile, params.quad_points);
  CsrMatrix K(d.ndof);
  std::vector<double> rhs(d.ndof, 0.0);
  auto coeffs = [&](int i, int je) { return layer1_coeffs(u, grid, params.eps, i, je); };
  auto ref = [&](int i, int j) { return d.n1(i, j); };
  assemble_layer(grid, nz1, grid.h_z1, coeffs, ref, K, rhs);

  // Interface penalty 1/2 int m (psi-1)^2 dx: P1 mass on the eta=1 row.
  const double hx = grid.h_x;
  for (int i = 0; i < mx - 1; ++i) {
    const double mc = robin_mass_coeff(u, profile, grid, params.eps, i);
    const NodeRef nodes[2] = {d.n1(i, nz1 - 1), d.n1(i + 1, nz1 - 1)};
    const double mass[2][2] = {{mc * hx / 3.0, mc * hx / 6.0}, {mc * hx / 6.0, mc * hx / 3.0}};
    for (int a = 0; a < 2; ++a) {
      if (nodes[a].dof < 0) continue;
      rhs[nodes[a].dof] += mc * hx / 2.0;  // linear term from (psi-1)^2
      for (int b = 0; b < 2; ++b) {
        if (nodes[b].dof >= 0)
          K.add(nodes[a].dof, nodes[b].dof, mass[a][b]);
        else
          rhs[nodes[a].dof] -= mass[a][b] * nodes[b].value;
      }
    }
  }

  std::vector<double> x;
  solve_linear(d, K, rhs, params, x, sol);

  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < nz1; ++j) {
      const NodeRef& r = d.n1(i, j);
      sol.psi1[static_cast<std::size_t>(i) * nz1 + j] = r.dof >= 0 ? x[r.dof] : r.value;
    }
  check_near_max_principle(sol.psi1, "solve_robin");

  auto val = [&](int i, int j) { return sol.p1(i, j); };
  double energy = layer_energy(grid, nz1, grid.h_z1, coeffs, val);
  for (int i = 0; i < mx - 1; ++i) {
    const double mc = robin_mass_coeff(u, profile, grid, params.eps, i);
    const double a = sol.p1(i, nz1 - 1) - 1.0;
    const double b = sol.p1(i + 1, nz1 - 1) - 1.0;
    energy += mc * (hx / 3.0) * (a * a + a * b + b * b);
  }
  sol.energy = -0.5 * energy;
  return sol;
}

std::vector<double> transmission_flux_mismatch(const PotentialSolution& sol,
                                               const DeflectionField& u,
                                               const PermittivityProfile& profile) {
  if (sol.model != PotentialModel::Transmission)
    throw InvalidArgument("flux_mismatch: transmission solution required");
  const Grid& grid = sol.grid;
  const int mx = grid.mx(), nz1 = grid.n_z1;
  const double eps = sol.eps, delta = sol.delta;
  std::vector<double> out(mx, 0.0);
  for (int i = 1; i < mx - 1; ++i) {
    const double up = (u[i + 1] - u[i - 1]) / (2.0 * grid.h_x);
    const double w = 1.0 + u[i];
    // one-sided second-order eta/zeta derivatives at the interface
    const double d1 = (3.0 * sol.p1(i, nz1 - 1) - 4.0 * sol.p1(i, nz1 - 2) +
                       sol.p1(i, nz1 - 3)) / (2.0 * grid.h_z1);
    const double d2 = (-3.0 * sol.p2(i, 0) + 4.0 * sol.p2(i, 1) - sol.p2(i, 2)) /
                      (2.0 * grid.h_z2);
    const double px1 = (sol.p1(i + 1, nz1 - 1) - sol.p1(i - 1, nz1 - 1)) / (2.0 * grid.h_x);
    const double px2 = (sol.p2(i + 1, 0) - sol.p2(i - 1, 0)) / (2.0 * grid.h_x);
    const double psi1_z = d1 / w;
    const double psi1_x = px1 - up / w * d1;  // eta = 1
    const double psi2_z = d2 / delta;
    const double psi2_x = px2 - up / delta * d2;
    const double s0 = profile.eval(grid.x(i), 0.0);
    out[i] = eps * eps * (psi1_x - s0 * psi2_x) * up - (psi1_z - s0 * psi2_z);
  }
  return out;
}

}  // namespace memsx
