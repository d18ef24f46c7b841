// memsx batch front door: one subcommand per invocation, JSON config in,
// plot-ready CSV/JSON out. Exit codes: 0 ok, 2 config error, 3 solver
// failure, 4 model-breakdown termination.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "memsx/config.hpp"
#include "memsx/dynamics.hpp"
#include "memsx/forces.hpp"
#include "memsx/io.hpp"
#include "memsx/limits.hpp"
#include "memsx/potential.hpp"
#include "memsx/steady.hpp"

namespace {

using namespace memsx;
using nlohmann::json;

struct CliRun {
  RunConfig cfg;
  std::string out_dir = ".";
  int jobs = 1;

  std::string path(const std::string& suffix) const {
    return out_dir + "/" + cfg.out_prefix + "_" + suffix;
  }
};

PotentialModel potential_kind(const RunConfig& cfg) {
  switch (cfg.kind) {
    case ForceModelSpec::Kind::Transmission: return PotentialModel::Transmission;
    case ForceModelSpec::Kind::Membrane: return PotentialModel::Membrane;
    case ForceModelSpec::Kind::Robin: return PotentialModel::Robin;
    default:
      throw ConfigError("config: this subcommand needs model.type transmission|membrane|robin");
  }
}

PotentialSolution solve_potential(const CliRun& run, const DeflectionField& u) {
  switch (potential_kind(run.cfg)) {
    case PotentialModel::Transmission:
      return solve_transmission(u, run.cfg.profile, run.cfg.params, run.cfg.grid);
    case PotentialModel::Membrane:
      return solve_membrane(u, run.cfg.params, run.cfg.grid);
    case PotentialModel::Robin:
      return solve_robin(u, run.cfg.profile, run.cfg.params, run.cfg.grid);
  }
  throw ConfigError("config: unreachable potential kind");
}

json meta_json(const CliRun& run) {
  json m;
  m["version"] = kVersion;
  m["config_hash"] = run.cfg.config_hash;
  return m;
}

int cmd_potential(const CliRun& run) {
  const DeflectionField u = run.cfg.initial_deflection();
  const PotentialSolution sol = solve_potential(run, u);
  const Grid& g = run.cfg.grid;

  CsvFile csv(run.path("potential_field.csv"), run.cfg.config_hash);
  csv.meta("model", std::to_string(static_cast<int>(sol.model)));
  csv.meta("energy", fmt_double(sol.energy));
  csv.header({"x", "z_physical", "layer", "psi"});
  for (int i = 0; i < g.mx(); ++i) {
    const double w = 1.0 + u[i];
    for (int j = 0; j < g.n_z1; ++j)
      csv.row({fmt_double(g.x(i)), fmt_double(-1.0 + g.eta(j) * w), "1",
               fmt_double(sol.p1(i, j))});
    if (!sol.psi2.empty())
      for (int k = 0; k < g.n_z2; ++k)
        csv.row({fmt_double(g.x(i)), fmt_double(u[i] + sol.delta * g.zeta(k)), "2",
                 fmt_double(sol.p2(i, k))});
  }

  json rep = meta_json(run);
  rep["energy"] = sol.energy;
  rep["iterations"] = sol.iterations;
  rep["residual"] = sol.residual;
  write_text_file(run.path("potential_summary.json"), rep.dump(2) + "\n");
  return 0;
}

int cmd_force(const CliRun& run) {
  const RunConfig& cfg = run.cfg;
  const DeflectionField u = cfg.initial_deflection();
  const PotentialModel model = potential_kind(cfg);
  const PotentialSolution sol = solve_potential(run, u);

  ForceField f;
  switch (model) {
    case PotentialModel::Transmission:
      f = force_transmission(sol, u, cfg.profile, cfg.params);
      break;
    case PotentialModel::Membrane: f = force_membrane(sol, u, cfg.params); break;
    case PotentialModel::Robin: f = force_robin(sol, u, cfg.profile, cfg.params); break;
  }

  CsvFile csv(run.path("force.csv"), cfg.config_hash);
  csv.header({"x", "g"});
  for (int i = 0; i < cfg.grid.mx(); ++i)
    csv.row({fmt_double(cfg.grid.x(i)), fmt_double(f.g[i])});

  json rep = meta_json(run);
  rep["reports"] = json::array();
  for (int t = 0; t < cfg.test_fields; ++t) {
    const std::vector<double> v =
        seeded_test_field(cfg.grid, cfg.params.seed + static_cast<std::uint64_t>(t),
                          cfg.test_scale);
    const ShapeDerivativeReport r = validate_shape_derivative(
        u, v, model, cfg.profile, cfg.params, cfg.grid, cfg.fd_step);
    json jr;
    jr["analytic"] = r.analytic;
    jr["fd_centered"] = r.fd_centered;
    jr["fd_plus"] = r.fd_plus;
    jr["fd_minus"] = r.fd_minus;
    jr["rel_err"] = r.rel_err;
    jr["step"] = r.step;
    rep["reports"].push_back(jr);
  }
  write_text_file(run.path("shape_derivative.json"), rep.dump(2) + "\n");
  return 0;
}

void write_trajectory(const CliRun& run, const Trajectory& traj) {
  const Grid& g = run.cfg.grid;
  CsvFile csv(run.path("trajectory.csv"), run.cfg.config_hash);
  csv.header({"t", "min_u", "E_m", "E_e_scaled", "total", "zipped_count"});
  for (const TrajectorySample& s : traj.samples)
    csv.row({fmt_double(s.t), fmt_double(s.min_u), fmt_double(s.e_mech),
             fmt_double(s.e_elec_scaled), fmt_double(s.total), std::to_string(s.zipped_count)});

  CsvFile snap(run.path("snapshot.csv"), run.cfg.config_hash);
  snap.header({"x", "u"});
  for (int i = 0; i < g.mx(); ++i)
    snap.row({fmt_double(g.x(i)), fmt_double(traj.final_u[i])});
}

int cmd_simulate(const CliRun& run) {
  const RunConfig& cfg = run.cfg;
  PlateState init;
  init.u = cfg.initial_deflection();
  init.t = 0.0;
  const Trajectory traj = simulate(init, cfg.force_model(), cfg.params, cfg.grid,
                                   cfg.effective_dt(), cfg.t_end, cfg.sample_every);
  write_trajectory(run, traj);
  return traj.termination == Termination::TouchdownBreakdown ? 4 : 0;
}

int cmd_steady(const CliRun& run) {
  const RunConfig& cfg = run.cfg;
  const SteadyResult res = steady_solve(cfg.params.lambda, cfg.force_model(), cfg.params,
                                        cfg.grid, cfg.initial_deflection());
  CsvFile snap(run.path("steady.csv"), cfg.config_hash);
  snap.header({"x", "u"});
  for (int i = 0; i < cfg.grid.mx(); ++i)
    snap.row({fmt_double(cfg.grid.x(i)), fmt_double(res.u[i])});

  json rep = meta_json(run);
  rep["converged"] = res.converged;
  rep["iterations"] = res.iterations;
  rep["residual"] = res.residual;
  rep["zipped_count"] = res.zipped_count;
  write_text_file(run.path("steady_summary.json"), rep.dump(2) + "\n");
  return res.converged ? 0 : 3;
}

int cmd_pullin(const CliRun& run) {
  const RunConfig& cfg = run.cfg;
  const PullInResult res =
      pull_in(cfg.force_model(), cfg.params, cfg.grid, cfg.bracket_lo, cfg.bracket_hi,
              cfg.tol_lambda, cfg.pullin_dt, cfg.pullin_t_end);
  json rep = meta_json(run);
  rep["lambda_star_steady"] = res.lambda_steady;
  rep["lambda_star_dynamic"] = res.lambda_dynamic;
  rep["gap"] = res.gap;
  rep["bisections_steady"] = res.steady_bisections;
  rep["bisections_dynamic"] = res.dynamic_bisections;
  write_text_file(run.path("pullin.json"), rep.dump(2) + "\n");
  return 0;
}

int cmd_bifurcate(const CliRun& run) {
  const RunConfig& cfg = run.cfg;
  if (cfg.lambda_grid.empty())
    throw ConfigError("config: bifurcate needs a lambda grid");
  const BifurcationTable table =
      bifurcation_diagram(cfg.force_model(), cfg.params, cfg.grid, cfg.lambda_grid);
  CsvFile csv(run.path("bifurcation.csv"), cfg.config_hash);
  csv.header({"lambda", "u_inf", "min_u", "E_total", "converged", "zipped_count",
              "newton_iters"});
  for (const BifurcationRow& r : table.rows)
    csv.row({fmt_double(r.lambda), fmt_double(r.u_inf), fmt_double(r.min_u),
             fmt_double(r.energy_total), r.converged ? "1" : "0",
             std::to_string(r.zipped_count), std::to_string(r.newton_iterations)});
  return 0;
}

int cmd_limits(const CliRun& run) {
  const RunConfig& cfg = run.cfg;
  if (cfg.sequence.empty()) throw ConfigError("config: limits.sequence is required");
  const DeflectionField u = cfg.initial_deflection();
  LimitTable table;
  std::string param_name;
  if (cfg.study == "thin_plate") {
    table = thin_plate_study(u, cfg.profile, cfg.scaling, cfg.sequence, cfg.params, cfg.grid,
                             run.jobs);
    param_name = "delta";
  } else {
    const PotentialModel model = cfg.kind == ForceModelSpec::Kind::Robin
                                     ? PotentialModel::Robin
                                     : PotentialModel::Transmission;
    table = aspect_ratio_study(u, cfg.profile, model, cfg.sequence, cfg.params, cfg.grid,
                               cfg.richardson, run.jobs);
    param_name = "eps";
  }
  CsvFile csv(run.path("limits.csv"), cfg.config_hash);
  csv.meta("study", cfg.study);
  csv.meta("grid", std::to_string(cfg.grid.n_x) + "x" + std::to_string(cfg.grid.n_z1) + "+" +
                       std::to_string(cfg.grid.n_z2));
  csv.header({param_name, "E_full", "E_limit", "gap", "order", "n_x", "n_z1", "n_z2"});
  for (const LimitRow& r : table.rows)
    csv.row({fmt_double(r.parameter), fmt_double(r.e_full), fmt_double(r.e_limit),
             fmt_double(r.gap), fmt_double(r.order), std::to_string(r.n_x),
             std::to_string(r.n_z1), std::to_string(r.n_z2)});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memsx: dimensionless MEMS electrostatics / plate dynamics laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* sub) {
    auto* positional = sub->add_option("config_file", config_path, "JSON config file");
    auto* flagged = sub->add_option("--config", config_path, "JSON config file (flag form)");
    positional->excludes(flagged);
    std::uint64_t tmp = 0;
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "parallel rows for sweep subcommands");
    auto* opt = sub->add_option("--seed", tmp, "override config seed");
    sub->callback([&, opt, positional, flagged, sub]() {
      if (!positional->count() && !flagged->count())
        throw CLI::RequiredError("config (positional or --config)");
      if (opt->count()) seed_override = sub->get_option("--seed")->as<std::uint64_t>();
    });
  };

  CLI::App* subs[] = {
      app.add_subcommand("potential", "solve the electrostatic problem, export field + energy"),
      app.add_subcommand("force", "force field + shape-derivative report"),
      app.add_subcommand("simulate", "time integration of the plate equation"),
      app.add_subcommand("steady", "single steady solve"),
      app.add_subcommand("pullin", "dual-method pull-in threshold"),
      app.add_subcommand("bifurcate", "steady continuation over a lambda grid"),
      app.add_subcommand("limits", "thin-plate or aspect-ratio study"),
  };
  for (CLI::App* s : subs) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    CliRun run;
    run.cfg = load_config(config_path);
    run.out_dir = out_dir;
    run.jobs = jobs;
    if (seed_override) run.cfg.params.seed = *seed_override;
    std::filesystem::create_directories(out_dir);

    if (app.got_subcommand("potential")) return cmd_potential(run);
    if (app.got_subcommand("force")) return cmd_force(run);
    if (app.got_subcommand("simulate")) return cmd_simulate(run);
    if (app.got_subcommand("steady")) return cmd_steady(run);
    if (app.got_subcommand("pullin")) return cmd_pullin(run);
    if (app.got_subcommand("bifurcate")) return cmd_bifurcate(run);
    if (app.got_subcommand("limits")) return cmd_limits(run);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const InvalidBracket& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}
