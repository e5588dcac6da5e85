#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "gibbs/cli.hpp"

namespace gibbs::cli {

namespace {

json matrix_json(const std::vector<std::vector<double>>& rows) { return json(rows); }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require_object(j, where);
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
  return x;
}

double positive(const json& j, const std::string& key, double fallback) {
  double x = number(j, key, fallback);
  if (!(x > 0.0)) throw ConfigError("'" + key + "' must be positive");
  return x;
}

int integer(const json& j, const std::string& key, int fallback, int lo, int hi) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  long long x = v.get<long long>();
  if (x < lo || x > hi)
    throw ConfigError("'" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

bool boolean(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

std::string string(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

void check_command(const json& cfg, const std::string& expected) {
  std::string c = string(cfg, "command", expected);
  if (c != expected) throw ConfigError("config command '" + c + "' does not match '" + expected + "'");
}

std::vector<std::vector<double>> parse_rows(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw ConfigError(where + " rows must be arrays");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) throw ConfigError(where + " entries must be numbers");
      r.push_back(x.get<double>());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

StochasticMatrix parse_matrix(const json& j, const std::string& where) {
  try {
    return StochasticMatrix(parse_rows(j, where));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

json preset(const std::string& name) {
  if (name == "figure-1" || name == "figure-2") {
    json origin = name == "figure-1" ? json::array({0.5, 0.5}) : json::array({0.35, 0.15});
    return {{"command", "geodesic"}, {"integrator", "closed-form"}, {"origin", origin}, {"directions", 16},
            {"t_max", 2.0},         {"step", 1e-2},                {"tolerance", 1e-8}, {"min_step", 1e-7},
            {"unit_speed", true},   {"sample_every", 1}};
  }
  if (name == "mama") {
    return {{"command", "divergence"},
            {"matrices",
             {matrix_json({{0.2, 0.8}, {0.8, 0.2}}), matrix_json({{0.15, 0.85}, {0.08, 0.92}}),
              matrix_json({{0.9, 0.1}, {0.88, 0.12}})}},
            {"depth", kDefaultWorkingDepth},
            {"references", {0.362455, 0.2750}},
            {"reference_tolerance", 2e-3}};
  }
  if (name == "bernoulli") {
    return {{"command", "divergence"},
            {"matrices",
             {matrix_json({{0.3, 0.7}, {0.3, 0.7}}), matrix_json({{0.6, 0.4}, {0.6, 0.4}}),
              matrix_json({{0.8, 0.2}, {0.8, 0.2}})}},
            {"depth", kDefaultWorkingDepth}};
  }
  throw ConfigError("unknown preset '" + name + "'");
}

json effective_config(const Invocation& inv) {
  if (inv.config_path.has_value() == inv.preset.has_value())
    throw ConfigError("exactly one of --config and --preset is required");
  json cfg;
  if (inv.preset) {
    cfg = preset(*inv.preset);
  } else {
    std::ifstream in(*inv.config_path);
    if (!in) throw ConfigError("cannot read config file " + *inv.config_path);
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  require_object(cfg, "config");
  std::string c = string(cfg, "command", inv.command);
  if (c != inv.command) throw ConfigError("config command '" + c + "' does not match '" + inv.command + "'");
  cfg["command"] = inv.command;
  if (inv.depth) cfg["depth"] = *inv.depth;
  if (inv.seed) cfg["seed"] = *inv.seed;
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const json& cfg) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << fnv1a64(cfg.dump());
  return os.str();
}

Potential parse_jacobian(const json& j, const std::string& where) {
  if (j.is_array()) {
    StochasticMatrix p = parse_matrix(j, where);
    try {
      return jacobian_potential(p);
    } catch (const NumericalError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  check_keys(j, {"alphabet", "depth", "values"}, where);
  int d = integer(j, "alphabet", 2, 2, 16);
  if (!j.contains("depth") || !j.contains("values")) throw ConfigError(where + " needs 'depth' and 'values'");
  int k = integer(j, "depth", 0, 0, depth_cap());
  const json& vals = j.at("values");
  if (!vals.is_array()) throw ConfigError(where + " values must be an array");
  std::vector<double> v;
  for (const auto& x : vals) {
    if (!x.is_number()) throw ConfigError(where + " values must be numbers");
    v.push_back(x.get<double>());
  }
  try {
    return normalize(Potential::raw(CylinderFunction(d, k, std::move(v))));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::length_error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

GeodesicJob parse_geodesic(const json& cfg) {
  check_keys(cfg,
             {"command", "integrator", "origin", "directions", "t_max", "step", "tolerance", "min_step",
              "unit_speed", "sample_every", "chart_bound", "seed"},
             "geodesic config");
  check_command(cfg, "geodesic");
  GeodesicJob job;
  std::string integ = string(cfg, "integrator", "closed-form");
  if (integ == "closed-form") job.integrator = Integrator::closed_form;
  else if (integ == "levi-civita") job.integrator = Integrator::levi_civita;
  else if (integ == "submanifold") job.integrator = Integrator::submanifold;
  else throw ConfigError("unknown integrator '" + integ + "'");
  if (cfg.contains("origin")) {
    const json& o = cfg.at("origin");
    if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number())
      throw ConfigError("'origin' must be [r, s]");
    job.r = o[0].get<double>();
    job.s = o[1].get<double>();
  }
  if (!(job.r > kDomainMargin && job.r < 1.0 - kDomainMargin && job.s > kDomainMargin &&
        job.s < 1.0 - kDomainMargin))
    throw ConfigError("'origin' must lie inside (0, 1)^2");
  if (!cfg.contains("directions")) throw ConfigError("'directions' is required");
  const json& dirs = cfg.at("directions");
  if (dirs.is_number_integer()) {
    int n = integer(cfg, "directions", 0, 1, 4096);
    for (int i = 0; i < n; ++i) job.angles.push_back(2.0 * std::numbers::pi * i / n);
  } else if (dirs.is_array()) {
    for (const auto& a : dirs) {
      if (!a.is_number()) throw ConfigError("'directions' angles must be numbers");
      job.angles.push_back(a.get<double>());
    }
  } else {
    throw ConfigError("'directions' must be a count or an array of angles");
  }
  if (job.angles.empty()) throw ConfigError("'directions' is empty");
  job.t_max = positive(cfg, "t_max", job.t_max);
  job.step = positive(cfg, "step", job.step);
  job.tolerance = positive(cfg, "tolerance", job.tolerance);
  job.min_step = positive(cfg, "min_step", job.min_step);
  if (job.min_step > job.step) throw ConfigError("'min_step' exceeds 'step'");
  job.unit_speed = boolean(cfg, "unit_speed", job.unit_speed);
  job.sample_every = integer(cfg, "sample_every", job.sample_every, 1, 1000000);
  job.chart_bound = positive(cfg, "chart_bound", job.chart_bound);
  if (cfg.contains("chart_bound") && job.integrator != Integrator::submanifold)
    throw ConfigError("'chart_bound' applies only to the submanifold integrator");
  return job;
}

DivergenceJob parse_divergence(const json& cfg) {
  check_keys(cfg,
             {"command", "matrices", "potentials", "depth", "oracle", "oracle_tolerance", "identity_tolerance",
              "references", "reference_tolerance", "seed"},
             "divergence config");
  check_command(cfg, "divergence");
  DivergenceJob job;
  if (cfg.contains("matrices") == cfg.contains("potentials"))
    throw ConfigError("exactly one of 'matrices' and 'potentials' is required");
  if (cfg.contains("matrices")) {
    const json& m = cfg.at("matrices");
    if (!m.is_array() || m.size() != 3) throw ConfigError("'matrices' must hold three matrices");
    std::array<StochasticMatrix, 3> ms;
    for (std::size_t i = 0; i < 3; ++i) {
      std::string where = "matrices[" + std::to_string(i) + "]";
      ms[i] = parse_matrix(m[i], where);
      job.jacobians[i] = parse_jacobian(m[i], where);
    }
    job.matrices = ms;
  } else {
    const json& p = cfg.at("potentials");
    if (!p.is_array() || p.size() != 3) throw ConfigError("'potentials' must hold three potentials");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!p[i].is_object()) throw ConfigError("potentials entries must be objects");
      job.jacobians[i] = parse_jacobian(p[i], "potentials[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 1; i < 3; ++i)
    if (job.jacobians[i].alphabet() != job.jacobians[0].alphabet())
      throw ConfigError("all jacobians must share one alphabet");
  job.depth = integer(cfg, "depth", job.depth, 1, depth_cap());
  if (cfg.contains("oracle")) {
    const json& o = cfg.at("oracle");
    check_keys(o, {"h1", "h2"}, "oracle");
    job.oracle.h1 = positive(o, "h1", job.oracle.h1);
    job.oracle.h2 = positive(o, "h2", job.oracle.h2);
    if (job.oracle.h1 == job.oracle.h2) throw ConfigError("oracle steps must differ");
  }
  job.oracle.depth = job.depth;
  job.oracle_tolerance = positive(cfg, "oracle_tolerance", job.oracle_tolerance);
  job.identity_tolerance = positive(cfg, "identity_tolerance", job.identity_tolerance);
  if (cfg.contains("references")) {
    const json& r = cfg.at("references");
    if (!r.is_array()) throw ConfigError("'references' must be an array of numbers");
    for (const auto& x : r) {
      if (!x.is_number()) throw ConfigError("'references' must be an array of numbers");
      job.references.push_back(x.get<double>());
    }
  }
  job.reference_tolerance = positive(cfg, "reference_tolerance", job.reference_tolerance);
  return job;
}

BasisJob parse_basis(const json& cfg) {
  check_keys(cfg, {"command", "kind", "matrix", "potential", "n_max", "tolerance", "seed"}, "basis config");
  check_command(cfg, "basis");
  BasisJob job;
  if (!cfg.contains("kind")) throw ConfigError("'kind' is required");
  try {
    job.kind = basis_kind_from_string(string(cfg, "kind", ""));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.contains("matrix") && cfg.contains("potential"))
    throw ConfigError("give at most one of 'matrix' and 'potential'");
  if (cfg.contains("matrix")) {
    job.source.matrix = parse_matrix(cfg.at("matrix"), "matrix");
    job.source.log_j = jacobian_potential(*job.source.matrix);
  }
  if (cfg.contains("potential")) {
    if (!cfg.at("potential").is_object()) throw ConfigError("'potential' must be an object");
    job.source.log_j = parse_jacobian(cfg.at("potential"), "potential");
  }
  job.n_max = integer(cfg, "n_max", job.n_max, 1, 10);
  job.tolerance = positive(cfg, "tolerance", job.tolerance);
  return job;
}

ProjectJob parse_project(const json& cfg) {
  check_keys(cfg,
             {"command", "vertices", "target", "mode", "slot", "family", "source", "certificate_tolerance",
              "line_tolerance", "max_iter", "depth", "seed"},
             "project config");
  check_command(cfg, "project");
  ProjectJob job;
  if (!cfg.contains("vertices") || !cfg.at("vertices").is_array())
    throw ConfigError("'vertices' must be an array");
  const json& v = cfg.at("vertices");
  if (v.size() < 2) throw ConfigError("a simplex needs at least two vertices");
  for (std::size_t i = 0; i < v.size(); ++i)
    job.problem.vertices.push_back(parse_jacobian(v[i], "vertices[" + std::to_string(i) + "]"));
  if (!cfg.contains("target")) throw ConfigError("'target' is required");
  job.problem.target = parse_jacobian(cfg.at("target"), "target");
  std::string mode = string(cfg, "mode", "min");
  if (mode == "min") job.problem.mode = Mode::min;
  else if (mode == "max") job.problem.mode = Mode::max;
  else throw ConfigError("'mode' must be min or max");
  std::string slot = string(cfg, "slot", "first");
  if (slot == "first") job.problem.slot = Problem::first;
  else if (slot == "second") job.problem.slot = Problem::second;
  else throw ConfigError("'slot' must be first or second");
  std::string fam = string(cfg, "family", "j");
  if (fam == "j") job.problem.family = FamilyKind::j;
  else if (fam == "log-j") job.problem.family = FamilyKind::log_j;
  else throw ConfigError("'family' must be j or log-j");
  std::string src = string(cfg, "source", "closed-form");
  if (src == "closed-form") job.options.source = DerivativeSource::closed_form;
  else if (src == "finite-difference") job.options.source = DerivativeSource::finite_difference;
  else throw ConfigError("'source' must be closed-form or finite-difference");
  job.options.certificate_tol = positive(cfg, "certificate_tolerance", job.options.certificate_tol);
  job.options.line_tol = positive(cfg, "line_tolerance", job.options.line_tol);
  job.options.max_iter = integer(cfg, "max_iter", job.options.max_iter, 1, 100000);
  job.problem.depth = integer(cfg, "depth", job.problem.depth, 1, depth_cap());
  for (std::size_t i = 0; i < job.problem.vertices.size(); ++i)
    for (std::size_t k = i + 1; k < job.problem.vertices.size(); ++k)
      if (sup_distance(job.problem.vertices[i].function(), job.problem.vertices[k].function()) < 1e-12)
        throw ConfigError("simplex vertices must be distinct");
  return job;
}

}  // namespace gibbs::cli
