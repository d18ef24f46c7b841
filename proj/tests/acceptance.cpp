// Acceptance suite: every release criterion in one deterministic binary,
// one pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "memsx/dynamics.hpp"
#include "memsx/forces.hpp"
#include "memsx/limits.hpp"
#include "memsx/potential.hpp"
#include "memsx/rng.hpp"
#include "memsx/steady.hpp"

using namespace memsx;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int idx, bool ok, const std::string& name, const std::string& detail) {
  std::printf("[%s] %2d/11 %s  (%s)\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// ---- 1: flat-plate capacitor exactness ---------------------------------

void criterion_1() {
  const double delta = 0.2, sigma = 2.0;
  const double a_coeff = 1.0 / 0.9;
  double linf_refined = 0.0, energy_err = 0.0;
  bool ok = true;
  for (int refine = 0; refine < 2; ++refine) {
    const Grid g = refine == 0 ? build_grid(63, 65, 17) : build_grid(127, 129, 33);
    ModelParams p;
    p.delta = delta;
    p.eps = 0.3;
    const DeflectionField u = flat_deflection(g, -0.2);
    const PotentialSolution sol =
        solve_transmission(u, PermittivityProfile::constant(sigma), p, g);

    double linf = 0.0;
    for (int i = 0; i < g.mx(); ++i) {
      for (int j = 0; j < g.n_z1; ++j) {
        const double z = -1.0 + g.eta(j) * 0.8;
        linf = std::max(linf, std::fabs(sol.p1(i, j) - a_coeff * (1.0 + z)));
      }
      for (int k = 0; k < g.n_z2; ++k) {
        const double z = -0.2 + delta * g.zeta(k);
        const double exact = 1.0 - a_coeff * (-0.2 + delta - z) / sigma;
        linf = std::max(linf, std::fabs(sol.p2(i, k) - exact));
      }
    }
    energy_err = std::fabs(sol.energy - (-0.5 / 0.9));
    ok = ok && energy_err <= 1e-6;
    if (refine == 1) {
      linf_refined = linf;
      ok = ok && linf <= 1e-6;
    }
  }
  report(1, ok, "flat-plate capacitor exactness",
         "Linf=" + fmt(linf_refined) + " dE=" + fmt(energy_err));
}

// ---- 2 & 3: shape derivatives + force decomposition --------------------

void criterion_2_3() {
  const Grid g = build_grid(127, 129, 33);
  const DeflectionField u = sine_deflection(g, -0.3);
  const PermittivityProfile prof = PermittivityProfile::constant(2.0);
  ModelParams p;
  p.delta = 0.1;
  p.eps = 0.1;

  bool ok2 = true;
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const std::vector<double> v = seeded_test_field(g, seed, 0.1);
    for (PotentialModel model :
         {PotentialModel::Transmission, PotentialModel::Membrane, PotentialModel::Robin}) {
      const ShapeDerivativeReport rep =
          validate_shape_derivative(u, v, model, prof, p, g, 1e-5);
      worst = std::max(worst, rep.rel_err);
      ok2 = ok2 && rep.rel_err <= 1e-3;
    }
  }
  report(2, ok2, "shape-derivative consistency (3 models x 3 seeded fields)",
         "max rel_err=" + fmt(worst));

  const PotentialSolution sol = solve_transmission(u, prof, p, g);
  const ForceField ft = force_transmission(sol, u, prof, p);
  const ForceField fp = force_pelesko(sol, u, prof, p);
  const TransmissionForceParts parts = transmission_force_parts(sol, u, prof, p);
  double dmax = 0.0;
  for (int i = 0; i < g.mx(); ++i) {
    const double rhs =
        parts.heterogeneity[i] + parts.jump_tangential[i] + parts.jump_normal[i];
    dmax = std::max(dmax, std::fabs(ft.g[i] - fp.g[i] - rhs));
  }
  report(3, dmax <= 1e-12, "force decomposition identity", "max dev=" + fmt(dmax));
}

// ---- 4 & 5: thin-plate limits -------------------------------------------

void criterion_4_5() {
  const Grid g = build_grid(63, 65, 17);
  ModelParams p;
  p.eps = 0.1;
  const PermittivityProfile prof = PermittivityProfile::constant(2.0);
  const DeflectionField u = sine_deflection(g, -0.3);
  const std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};

  auto check_table = [](const LimitTable& t) {
    bool ok = true;
    double worst_order = 1e9;
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
      ok = ok && t.rows[k].gap < t.rows[k - 1].gap;
      ok = ok && t.rows[k].order >= 0.9;
      worst_order = std::min(worst_order, t.rows[k].order);
    }
    return std::make_pair(ok, worst_order);
  };

  const LimitTable o1 = thin_plate_study(u, prof, ThinPlateScaling::O1, deltas, p, g);
  const auto [ok4, order4] = check_table(o1);
  report(4, ok4, "thin-plate limit O(1) vs membrane", "min order=" + fmt(order4));

  const LimitTable od = thin_plate_study(u, prof, ThinPlateScaling::Od, deltas, p, g);
  auto [ok5, order5] = check_table(od);

  const DeflectionField uflat = flat_deflection(g, -0.2);
  const LimitTable odf = thin_plate_study(uflat, prof, ThinPlateScaling::Od, deltas, p, g);
  double flat_gap = 0.0;
  for (const LimitRow& r : odf.rows) flat_gap = std::max(flat_gap, r.gap);
  ok5 = ok5 && flat_gap <= p.tol_linear;
  report(5, ok5, "thin-plate limit O(d) vs robin",
         "min order=" + fmt(order5) + " flat gap=" + fmt(flat_gap));
}

// ---- 6: vanishing aspect ratio ------------------------------------------

void criterion_6() {
  const Grid g = build_grid(63, 65, 17);
  ModelParams p;
  p.delta = 0.1;
  const PermittivityProfile prof = PermittivityProfile::constant(2.0);
  const DeflectionField u = sine_deflection(g, -0.3);
  const std::vector<double> eps_seq = {0.2, 0.1, 0.05};

  bool ok = true;
  double worst_order = 1e9;
  for (PotentialModel model : {PotentialModel::Transmission, PotentialModel::Robin}) {
    const LimitTable t = aspect_ratio_study(u, prof, model, eps_seq, p, g, true);
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
      ok = ok && t.rows[k].order >= 1.8;
      worst_order = std::min(worst_order, t.rows[k].order);
    }
  }
  const DeflectionField uflat = flat_deflection(g, -0.2);
  double flat_gap = 0.0;
  for (PotentialModel model : {PotentialModel::Transmission, PotentialModel::Robin}) {
    const LimitTable t = aspect_ratio_study(uflat, prof, model, eps_seq, p, g, false);
    for (const LimitRow& r : t.rows) flat_gap = std::max(flat_gap, r.gap);
  }
  ok = ok && flat_gap <= p.tol_linear;
  report(6, ok, "vanishing-aspect-ratio limits (transmission + robin)",
         "min order=" + fmt(worst_order) + " flat gap=" + fmt(flat_gap));
}

// ---- 7: pull-in cross validation ----------------------------------------

double criterion_7() {
  const Grid g = build_grid(31, 8, 4);
  ModelParams p;
  p.beta = 0.0;
  p.tau = 1.0;
  p.gamma2 = 0.0;
  p.eps = 0.0;

  const PullInResult classical =
      pull_in(ForceModelSpec::reduced_classical(), p, g, 1e-3, 50.0, 1e-4);
  const double rel_gap = classical.gap / std::max(classical.lambda_steady, 1e-30);
  bool ok = rel_gap <= 0.01;

  double prev = 0.0;
  bool monotone = true;
  for (double c : {0.0, 0.1, 0.25}) {
    const ForceModelSpec model = c == 0.0 ? ForceModelSpec::reduced_classical()
                                          : ForceModelSpec::reduced_constant_n(g, c);
    const PullInResult r = pull_in(model, p, g, 1e-3, 50.0, 1e-4);
    monotone = monotone && (r.lambda_steady >= prev);
    prev = r.lambda_steady;
  }
  ok = ok && monotone;
  report(7, ok, "pull-in: dual-method agreement + monotonicity in N",
         "lambda*=" + fmt(classical.lambda_steady) + " rel gap=" + fmt(rel_gap) +
             (monotone ? " monotone" : " NOT monotone"));
  return classical.lambda_steady;
}

// ---- 8: zipped states without breakdown ---------------------------------

void criterion_8(double lambda_star_classical) {
  const Grid g = build_grid(31, 8, 4);
  ModelParams p;
  p.beta = 0.0;
  p.tau = 1.0;
  p.gamma2 = 0.0;
  p.eps = 0.0;
  p.lambda = 2.0 * lambda_star_classical;
  const ForceModelSpec model = ForceModelSpec::reduced_constant_n(g, 0.25);

  const Trajectory tr = simulate(rest_state(g, p), model, p, g, g.h_x * g.h_x / 4.0,
                                 1000.0, 1 << 20);
  bool ok = tr.steady && tr.touchdown_time.has_value();

  const SteadyResult st =
      steady_solve(p.lambda, model, p, g, DeflectionField(tr.final_u));
  ok = ok && st.converged && st.zipped_count > 0;
  ok = ok && st.u.min() >= -1.0;  // exact bound in projection mode

  const ReactionField zeta = extract_reaction(st.u, model, p, g);
  double comp = 0.0, zmax_contact = -1e30;
  for (int i = 0; i < g.mx(); ++i) {
    comp = std::max(comp, std::fabs(zeta.zeta[i] * (st.u[i] + 1.0)));
    if (st.u[i] <= -1.0 + p.contact_tol) zmax_contact = std::max(zmax_contact, zeta.zeta[i]);
  }
  ok = ok && comp <= 1e-6 && zmax_contact <= 1e-9;
  report(8, ok, "zipped steady state without model breakdown",
         "zipped=" + std::to_string(st.zipped_count) + " |zeta(u+1)|=" + fmt(comp));
}

// ---- 9: energy dissipation ----------------------------------------------

void criterion_9() {
  const Grid g = build_grid(63, 8, 4);
  const double dt = g.h_x * g.h_x / 4.0;
  const PermittivityProfile prof = PermittivityProfile::constant(2.0);

  struct Case {
    const char* name;
    ForceModelSpec model;
    double lambda, beta, tau;
  };
  std::vector<Case> cases;
  cases.push_back({"classical", ForceModelSpec::reduced_classical(), 1.0, 0.0, 1.0});
  cases.push_back({"transmission", ForceModelSpec::reduced_constant_n(g, 0.25), 2.5, 0.0, 1.0});
  cases.push_back({"robin", ForceModelSpec::reduced_robin(prof, g), 1.5, 0.0, 1.0});
  cases.push_back({"clamped", ForceModelSpec::reduced_classical(), 5.0, 1.0, 0.1});

  bool ok = true;
  double worst = -1e30;
  for (const Case& c : cases) {
    ModelParams p;
    p.lambda = c.lambda;
    p.beta = c.beta;
    p.tau = c.tau;
    p.gamma2 = 0.0;
    p.eps = 0.0;
    const Trajectory tr = simulate(rest_state(g, p), c.model, p, g, dt, 2.0, 1);
    ok = ok && tr.samples.back().min_u > -0.9;  // away from contact
    for (std::size_t k = 1; k < tr.samples.size(); ++k) {
      const double rise = tr.samples[k].total - tr.samples[k - 1].total;
      worst = std::max(worst, rise);
      ok = ok && rise <= 1e-8;
    }
  }
  report(9, ok, "per-step energy dissipation (gamma=0, dt=h^2/4)",
         "max rise=" + fmt(worst));
}

// ---- 10: energy monotonicity in u ---------------------------------------

void criterion_10() {
  const Grid g = build_grid(31, 33, 9);
  ModelParams p;
  p.delta = 0.2;
  p.eps = 0.3;
  const PermittivityProfile prof = PermittivityProfile::constant(2.0);

  bool ok = true;
  double margin = 1e30;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SplitMix64 rng(seed * 977);
    const double a1 = -0.25 * rng.uniform01() - 0.05;
    const double a2 = 0.1 * (2.0 * rng.uniform01() - 1.0);
    const double bump = 0.05 + 0.15 * rng.uniform01();
    std::vector<double> hi(g.mx()), lo(g.mx());
    for (int i = 0; i < g.mx(); ++i) {
      const double x = g.x(i);
      hi[i] = a1 * std::sin(kPi * x) + a2 * std::sin(2.0 * kPi * x);
      lo[i] = hi[i] - bump * std::sin(kPi * x);
    }
    hi.front() = hi.back() = lo.front() = lo.back() = 0.0;
    const double ea = solve_transmission(DeflectionField(lo), prof, p, g).energy;
    const double eb = solve_transmission(DeflectionField(hi), prof, p, g).energy;
    ok = ok && ea <= eb + 1e-10;
    margin = std::min(margin, eb - ea);
  }
  report(10, ok, "energy monotonicity in u (sigma nondecreasing, >= 1)",
         "min margin=" + fmt(margin));
}

// ---- 11: determinism of the cli -----------------------------------------

void criterion_11() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "memsx_acceptance_det";
  fs::create_directories(dir);
  const fs::path cfg = dir / "pullin.json";
  {
    std::ofstream out(cfg);
    out << R"({
  "model": {"type": "reduced_classical", "lambda": 1.0, "tau": 1.0},
  "geometry": {"n_x": 23, "n_z1": 8, "n_z2": 4},
  "pullin": {"bracket": [1.0, 6.0], "tol_lambda": 1e-3},
  "output": {"prefix": "det"}
})";
  }
  auto run_once = [&]() -> std::string {
    const std::string cmd = std::string(MEMSX_BIN) + " pullin " + cfg.string() + " --out " +
                            dir.string() + " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return "";
    std::ifstream in(dir / "det_pullin.json", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = run_once();
  const std::string b = run_once();
  const bool ok = !a.empty() && a == b;
  std::error_code ec;
  fs::remove_all(dir, ec);
  report(11, ok, "repeated pullin runs produce byte-identical reports",
         ok ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("memsx acceptance suite\n");
  criterion_1();
  criterion_2_3();
  criterion_4_5();
  criterion_6();
  const double lambda_star = criterion_7();
  criterion_8(lambda_star);
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d/11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
