#include "memsx/config.hpp"

#include <set>

#include <json.hpp>

#include "memsx/io.hpp"

namespace memsx {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + where + "." + it.key() + "'");
}

double get_num(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("config: '" + where + "." + key + "' must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigError("config: '" + where + "." + key + "' must be an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean())
    throw ConfigError("config: '" + where + "." + key + "' must be a boolean");
  return obj[key].get<bool>();
}

std::string get_str(const json& obj, const std::string& where, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string())
    throw ConfigError("config: '" + where + "." + key + "' must be a string");
  return obj[key].get<std::string>();
}

std::vector<double> get_vec(const json& obj, const std::string& where, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) throw ConfigError("config: '" + where + "." + key + "' must be an array");
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError("config: '" + where + "." + key + "' has a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

ForceModelSpec::Kind parse_kind(const std::string& s) {
  if (s == "transmission") return ForceModelSpec::Kind::Transmission;
  if (s == "membrane") return ForceModelSpec::Kind::Membrane;
  if (s == "robin") return ForceModelSpec::Kind::Robin;
  if (s == "reduced_classical") return ForceModelSpec::Kind::ReducedClassical;
  if (s == "reduced_transmission") return ForceModelSpec::Kind::ReducedTransmission;
  if (s == "reduced_robin") return ForceModelSpec::Kind::ReducedRobin;
  throw ConfigError("config: unknown model.type '" + s + "'");
}

}  // namespace

ForceModelSpec RunConfig::force_model() const {
  switch (kind) {
    case ForceModelSpec::Kind::ReducedClassical:
      return ForceModelSpec::reduced_classical();
    case ForceModelSpec::Kind::ReducedTransmission:
      if (n_constant) return ForceModelSpec::reduced_constant_n(grid, *n_constant);
      return ForceModelSpec::reduced_transmission(profile, grid, params);
    case ForceModelSpec::Kind::ReducedRobin:
      if (n_constant) {
        ForceModelSpec m = ForceModelSpec::reduced_constant_n(grid, *n_constant);
        m.kind = ForceModelSpec::Kind::ReducedRobin;
        return m;
      }
      return ForceModelSpec::reduced_robin(profile, grid);
    default:
      return ForceModelSpec::potential(kind, profile);
  }
}

DeflectionField RunConfig::initial_deflection() const {
  if (initial_type == "zero") return flat_deflection(grid, 0.0, params.u_max);
  if (initial_type == "flat") return flat_deflection(grid, initial_level, params.u_max);
  if (initial_type == "sine") return sine_deflection(grid, initial_amp, initial_k, params.u_max);
  throw ConfigError("config: unknown dynamics.initial.type '" + initial_type + "'");
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  require_keys(doc, "", {"model", "geometry", "permittivity", "dynamics", "force", "steady",
                         "pullin", "bifurcate", "limits", "output"});

  RunConfig cfg;
  cfg.config_hash = hex64(fnv1a64(text));

  if (!doc.contains("model") || !doc["model"].is_object())
    throw ConfigError("config: required object 'model' missing");
  const json& model = doc["model"];
  require_keys(model, "model",
               {"type", "lambda", "gamma2", "beta", "tau", "delta", "eps", "obstacle",
                "penalty_s", "n_constant", "tol_linear", "tol_newton", "gap_tol", "contact_tol",
                "steady_tol", "quad_points", "newton_max_iter", "u_max", "seed", "backend"});
  cfg.kind = parse_kind(get_str(model, "model", "type", "reduced_classical"));
  ModelParams& p = cfg.params;
  p.lambda = get_num(model, "model", "lambda", p.lambda);
  p.gamma2 = get_num(model, "model", "gamma2", p.gamma2);
  p.beta = get_num(model, "model", "beta", 0.0);
  p.tau = get_num(model, "model", "tau", 1.0);
  p.delta = get_num(model, "model", "delta", p.delta);
  p.eps = get_num(model, "model", "eps", p.eps);
  p.penalty_s = get_num(model, "model", "penalty_s", p.penalty_s);
  p.tol_linear = get_num(model, "model", "tol_linear", p.tol_linear);
  p.tol_newton = get_num(model, "model", "tol_newton", p.tol_newton);
  p.gap_tol = get_num(model, "model", "gap_tol", p.gap_tol);
  p.contact_tol = get_num(model, "model", "contact_tol", p.contact_tol);
  p.steady_tol = get_num(model, "model", "steady_tol", p.steady_tol);
  p.quad_points = get_int(model, "model", "quad_points", p.quad_points);
  p.newton_max_iter = get_int(model, "model", "newton_max_iter", p.newton_max_iter);
  p.u_max = get_num(model, "model", "u_max", p.u_max);
  if (model.contains("seed")) {
    if (!model["seed"].is_number_unsigned() && !model["seed"].is_number_integer())
      throw ConfigError("config: 'model.seed' must be an integer");
    cfg.params.seed = model["seed"].get<std::uint64_t>();
  }
  const std::string obstacle = get_str(model, "model", "obstacle", "projection");
  if (obstacle == "projection")
    p.obstacle_mode = ObstacleMode::Projection;
  else if (obstacle == "penalty")
    p.obstacle_mode = ObstacleMode::Penalty;
  else
    throw ConfigError("config: model.obstacle must be 'projection' or 'penalty'");
  const std::string backend = get_str(model, "model", "backend", "pcg");
  if (backend == "pcg")
    p.backend = LinearBackend::Pcg;
  else if (backend == "direct")
    p.backend = LinearBackend::Direct;
  else
    throw ConfigError("config: model.backend must be 'pcg' or 'direct'");
  if (model.contains("n_constant")) cfg.n_constant = get_num(model, "model", "n_constant", 0.0);
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (!doc.contains("geometry") || !doc["geometry"].is_object())
    throw ConfigError("config: required object 'geometry' missing");
  const json& geo = doc["geometry"];
  require_keys(geo, "geometry", {"n_x", "n_z1", "n_z2"});
  const int n_x = get_int(geo, "geometry", "n_x", 63);
  const int n_z1 = get_int(geo, "geometry", "n_z1", 65);
  const int n_z2 = get_int(geo, "geometry", "n_z2", 17);
  try {
    cfg.grid = build_grid(n_x, n_z1, n_z2);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (doc.contains("permittivity")) {
    const json& perm = doc["permittivity"];
    require_keys(perm, "permittivity", {"family", "a0", "ax", "as"});
    const std::string family = get_str(perm, "permittivity", "family", "constant");
    const double a0 = get_num(perm, "permittivity", "a0", 2.0);
    const double ax = get_num(perm, "permittivity", "ax", 0.0);
    const double as = get_num(perm, "permittivity", "as", 0.0);
    try {
      if (family == "constant")
        cfg.profile = PermittivityProfile::constant(a0);
      else if (family == "affine")
        cfg.profile = PermittivityProfile::affine(a0, as);
      else if (family == "separable")
        cfg.profile = PermittivityProfile::separable(a0, ax, as);
      else
        throw ConfigError("config: unknown permittivity.family '" + family + "'");
    } catch (const InvalidProfile& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }

  if (doc.contains("dynamics")) {
    const json& dyn = doc["dynamics"];
    require_keys(dyn, "dynamics", {"dt", "t_end", "sample_every", "initial"});
    cfg.dt = get_num(dyn, "dynamics", "dt", 0.0);
    cfg.t_end = get_num(dyn, "dynamics", "t_end", 10.0);
    cfg.sample_every = get_int(dyn, "dynamics", "sample_every", 1);
    if (dyn.contains("initial")) {
      const json& init = dyn["initial"];
      require_keys(init, "dynamics.initial", {"type", "level", "amp", "k"});
      cfg.initial_type = get_str(init, "dynamics.initial", "type", "zero");
      cfg.initial_level = get_num(init, "dynamics.initial", "level", 0.0);
      cfg.initial_amp = get_num(init, "dynamics.initial", "amp", 0.0);
      cfg.initial_k = get_int(init, "dynamics.initial", "k", 1);
    }
  }

  if (doc.contains("force")) {
    const json& f = doc["force"];
    require_keys(f, "force", {"fd_step", "test_scale", "test_fields"});
    cfg.fd_step = get_num(f, "force", "fd_step", 1.0e-5);
    cfg.test_scale = get_num(f, "force", "test_scale", 0.1);
    cfg.test_fields = get_int(f, "force", "test_fields", 3);
  }

  if (doc.contains("steady")) {
    const json& s = doc["steady"];
    require_keys(s, "steady", {});
    (void)s;
  }

  if (doc.contains("pullin")) {
    const json& pi = doc["pullin"];
    require_keys(pi, "pullin", {"bracket", "tol_lambda", "t_end", "dt"});
    const std::vector<double> bracket = get_vec(pi, "pullin", "bracket");
    if (!bracket.empty()) {
      if (bracket.size() != 2) throw ConfigError("config: pullin.bracket must have 2 entries");
      cfg.bracket_lo = bracket[0];
      cfg.bracket_hi = bracket[1];
    }
    cfg.tol_lambda = get_num(pi, "pullin", "tol_lambda", 1.0e-4);
    cfg.pullin_t_end = get_num(pi, "pullin", "t_end", 2000.0);
    cfg.pullin_dt = get_num(pi, "pullin", "dt", 0.0);
  }

  if (doc.contains("bifurcate")) {
    const json& b = doc["bifurcate"];
    require_keys(b, "bifurcate", {"grid", "lambda_min", "lambda_max", "count"});
    cfg.lambda_grid = get_vec(b, "bifurcate", "grid");
    if (cfg.lambda_grid.empty() && b.contains("count")) {
      const double lo = get_num(b, "bifurcate", "lambda_min", 0.0);
      const double hi = get_num(b, "bifurcate", "lambda_max", 1.0);
      const int count = get_int(b, "bifurcate", "count", 2);
      if (count < 1 || !(hi > lo))
        throw ConfigError("config: bifurcate range must have count >= 1 and max > min");
      for (int i = 0; i < count; ++i)
        cfg.lambda_grid.push_back(lo + (hi - lo) * i / std::max(1, count - 1));
    }
  }

  if (doc.contains("limits")) {
    const json& lm = doc["limits"];
    require_keys(lm, "limits", {"study", "scaling", "sequence", "richardson"});
    cfg.study = get_str(lm, "limits", "study", "thin_plate");
    if (cfg.study != "thin_plate" && cfg.study != "aspect_ratio")
      throw ConfigError("config: limits.study must be 'thin_plate' or 'aspect_ratio'");
    const std::string scaling = get_str(lm, "limits", "scaling", "O1");
    if (scaling == "O1")
      cfg.scaling = ThinPlateScaling::O1;
    else if (scaling == "Od")
      cfg.scaling = ThinPlateScaling::Od;
    else
      throw ConfigError("config: limits.scaling must be 'O1' or 'Od'");
    cfg.sequence = get_vec(lm, "limits", "sequence");
    cfg.richardson = get_bool(lm, "limits", "richardson", true);
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_keys(o, "output", {"prefix"});
    cfg.out_prefix = get_str(o, "output", "prefix", "memsx");
  }

  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

}  // namespace memsx
