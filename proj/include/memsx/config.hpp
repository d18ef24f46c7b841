#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memsx/dynamics.hpp"
#include "memsx/limits.hpp"
#include "memsx/params.hpp"

namespace memsx {

// One JSON document drives every subcommand: {model, geometry, permittivity,
// dynamics, force, steady, pullin, bifurcate, limits, output}. Unknown keys
// anywhere are a hard error.
struct RunConfig {
  ModelParams params;
  ForceModelSpec::Kind kind = ForceModelSpec::Kind::ReducedClassical;
  std::optional<double> n_constant;  // overrides the reduced N field
  Grid grid;
  PermittivityProfile profile = PermittivityProfile::constant(2.0);

  // dynamics
  double dt = 0.0;  // 0 => h_x^2/4
  double t_end = 10.0;
  int sample_every = 1;
  std::string initial_type = "zero";  // zero | flat | sine
  double initial_level = 0.0;
  double initial_amp = 0.0;
  int initial_k = 1;

  // force subcommand
  double fd_step = 1.0e-5;
  double test_scale = 0.1;
  int test_fields = 3;

  // pullin
  double bracket_lo = 1.0e-3;
  double bracket_hi = 50.0;
  double tol_lambda = 1.0e-4;
  double pullin_t_end = 2000.0;
  double pullin_dt = 0.0;

  // bifurcate
  std::vector<double> lambda_grid;

  // limits
  std::string study = "thin_plate";  // thin_plate | aspect_ratio
  ThinPlateScaling scaling = ThinPlateScaling::O1;
  std::vector<double> sequence;
  bool richardson = true;

  std::string out_prefix = "memsx";
  std::string config_hash;

  ForceModelSpec force_model() const;
  DeflectionField initial_deflection() const;
  double effective_dt() const { return dt > 0.0 ? dt : grid.h_x * grid.h_x / 4.0; }
};

// Throws ConfigError with a line-numbered message on parse errors and a
// path-qualified message on schema violations.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace memsx
