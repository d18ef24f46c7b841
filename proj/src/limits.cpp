#include "memsx/limits.hpp"

#include <cmath>
#include <thread>

namespace memsx {

namespace {

void fill_orders(LimitTable& table, const std::vector<double>& seq, double tol_linear) {
  // orders are only meaningful when the gaps stand above solver noise
  const double floor = 10.0 * tol_linear;
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const double g0 = table.rows[k - 1].gap;
    const double g1 = table.rows[k].gap;
    if (g0 > floor && g1 > floor)
      table.rows[k].order = std::log(g0 / g1) / std::log(seq[k - 1] / seq[k]);
  }
}

void require_decreasing(const std::vector<double>& seq, const char* who) {
  if (seq.empty()) throw InvalidArgument(std::string(who) + ": empty sequence");
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (!(seq[i] < seq[i - 1]))
      throw InvalidArgument(std::string(who) + ": sequence must be strictly decreasing");
}

template <typename Fn>
void run_rows(std::size_t n, int jobs, Fn fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t stride = static_cast<std::size_t>(jobs);
  for (std::size_t t = 0; t < stride; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += stride) fn(i);
    });
  for (auto& th : pool) th.join();
}

Grid refined(const Grid& g) {
  return build_grid(2 * g.n_x + 1, 2 * (g.n_z1 - 1) + 1, 2 * (g.n_z2 - 1) + 1);
}

DeflectionField resample(const DeflectionField& u, const Grid& from, const Grid& to,
                         double u_max) {
  // 4-point Lagrange on the uniform source grid (O(h^4), so the resampling
  // does not reintroduce the h^2 bias Richardson removes)
  const int m = from.mx();
  std::vector<double> v(to.mx());
  for (int i = 0; i < to.mx(); ++i) {
    const double xc = to.x(i) / from.h_x;
    int i1 = static_cast<int>(std::floor(xc));
    i1 = std::max(1, std::min(m - 3, i1));
    const double t = xc - i1;  // in [0,1] away from the ends
    const double c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    v[i] = c0 * u[i1 - 1] + c1 * u[i1] + c2 * u[i1 + 1] + c3 * u[i1 + 2];
  }
  v.front() = u[0];
  v.back() = u[m - 1];
  return DeflectionField(std::move(v), u_max);
}

// Composite Simpson when the interval count is even, trapezoid otherwise;
// the study compares FEM energies against this quadrature, so its error
// must sit below the eps^2 gaps.
double reduced_energy_hiord(const DeflectionField& u, const std::vector<double>& n_field,
                            const Grid& grid) {
  const int m = grid.mx();
  std::vector<double> f(m);
  for (int i = 0; i < m; ++i) {
    const double den = 1.0 + u[i] + n_field[i];
    if (!(den > 0.0)) throw SingularForce("reduced_energy: 1+u+N not positive");
    f[i] = -0.5 / den;
  }
  const int intervals = m - 1;
  if (intervals % 2 != 0) {
    double s = 0.5 * (f.front() + f.back());
    for (int i = 1; i < m - 1; ++i) s += f[i];
    return s * grid.h_x;
  }
  double s = f.front() + f.back();
  for (int i = 1; i < m - 1; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * grid.h_x / 3.0;
}

}  // namespace

LimitTable thin_plate_study(const DeflectionField& u, const PermittivityProfile& profile,
                            ThinPlateScaling scaling, const std::vector<double>& delta_sequence,
                            const ModelParams& params, const Grid& grid, int jobs) {
  require_decreasing(delta_sequence, "thin_plate_study");
  for (double d : delta_sequence)
    if (!(d > 0.0)) throw InvalidArgument("thin_plate_study: deltas must be > 0");

  // the limit model energy is delta-independent: one solve
  double e_limit = 0.0;
  if (scaling == ThinPlateScaling::O1) {
    e_limit = solve_membrane(u, params, grid).energy;
  } else {
    e_limit = solve_robin(u, profile, params, grid).energy;
  }

  LimitTable table;
  table.rows.resize(delta_sequence.size());
  run_rows(delta_sequence.size(), jobs, [&](std::size_t k) {
    const double d = delta_sequence[k];
    ModelParams p = params;
    p.delta = d;
    const PermittivityProfile layer =
        scaling == ThinPlateScaling::Od ? profile.scaled(d) : profile;
    const PotentialSolution sol = solve_transmission(u, layer, p, grid);
    LimitRow row;
    row.parameter = d;
    row.e_full = sol.energy;
    row.e_limit = e_limit;
    row.gap = std::fabs(sol.energy - e_limit);
    row.n_x = grid.n_x;
    row.n_z1 = grid.n_z1;
    row.n_z2 = grid.n_z2;
    table.rows[k] = row;
  });
  fill_orders(table, delta_sequence, params.tol_linear);
  return table;
}

LimitTable aspect_ratio_study(const DeflectionField& u, const PermittivityProfile& profile,
                              PotentialModel model, const std::vector<double>& eps_sequence,
                              const ModelParams& params, const Grid& grid, bool richardson,
                              int jobs) {
  require_decreasing(eps_sequence, "aspect_ratio_study");
  if (model == PotentialModel::Membrane)
    throw InvalidArgument("aspect_ratio_study: model must be Transmission or Robin");

  std::vector<double> n_field(grid.mx());
  if (model == PotentialModel::Transmission) {
    n_field = n_delta(profile, grid, params.delta, params.quad_points);
  } else {
    for (int i = 0; i < grid.mx(); ++i) n_field[i] = 1.0 / profile.eval(grid.x(i), 0.0);
  }
  const double e_reduced = reduced_energy_hiord(u, n_field, grid);

  const Grid fine = richardson ? refined(grid) : grid;
  const DeflectionField u_fine =
      richardson ? resample(u, grid, fine, params.u_max) : u;

  LimitTable table;
  table.rows.resize(eps_sequence.size());
  run_rows(eps_sequence.size(), jobs, [&](std::size_t k) {
    ModelParams p = params;
    p.eps = eps_sequence[k];
    auto solve_at = [&](const DeflectionField& w, const Grid& g) {
      return model == PotentialModel::Transmission ? solve_transmission(w, profile, p, g).energy
                                                   : solve_robin(w, profile, p, g).energy;
    };
    double e_full = solve_at(u, grid);
    LimitRow row;
    row.n_x = grid.n_x;
    row.n_z1 = grid.n_z1;
    row.n_z2 = grid.n_z2;
    if (richardson) {
      const double e_half = solve_at(u_fine, fine);
      e_full = (4.0 * e_half - e_full) / 3.0;  // cancel the h^2 energy bias
      row.n_x = fine.n_x;
      row.n_z1 = fine.n_z1;
      row.n_z2 = fine.n_z2;
    }
    row.parameter = eps_sequence[k];
    row.e_full = e_full;
    row.e_limit = e_reduced;
    row.gap = std::fabs(e_full - e_reduced);
    table.rows[k] = row;
  });
  fill_orders(table, eps_sequence, params.tol_linear);
  return table;
}

}  // namespace memsx
