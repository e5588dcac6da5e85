#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbs/divergence.hpp"
#include "gibbs/geodesics.hpp"
#include "gibbs/haar.hpp"
#include "gibbs/markov.hpp"

namespace gibbs::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Invocation {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::string out_dir = ".";
  std::optional<int> depth;
  std::optional<std::uint64_t> seed;
};

json preset(const std::string& name);
// Config from file or preset with command-line overrides applied.
json effective_config(const Invocation& inv);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const json& cfg);

// Matrix (array of rows) or {"depth": k, "values": [...]} raw potential; returns log J.
Potential parse_jacobian(const json& j, const std::string& where);

enum class Integrator { closed_form, levi_civita, submanifold };

struct GeodesicJob {
  Integrator integrator = Integrator::closed_form;
  double r = 0.5;
  double s = 0.5;
  std::vector<double> angles;
  double t_max = 2.0;
  double step = 1e-2;
  double tolerance = 1e-8;
  double min_step = 1e-7;
  bool unit_speed = true;
  int sample_every = 1;
  double chart_bound = 0.5;
};

struct DivergenceJob {
  std::array<Potential, 3> jacobians;
  std::optional<std::array<StochasticMatrix, 3>> matrices;
  int depth = kDefaultWorkingDepth;
  OracleOptions oracle;
  double oracle_tolerance = 1e-6;
  double identity_tolerance = 1e-12;
  std::vector<double> references;
  double reference_tolerance = 2e-3;
};

struct BasisJob {
  BasisKind kind = BasisKind::maxent_beta;
  FamilySource source;
  int n_max = 4;
  double tolerance = 1e-10;
};

struct ProjectJob {
  SimplexProblem problem;
  SimplexOptions options;
};

GeodesicJob parse_geodesic(const json& cfg);
DivergenceJob parse_divergence(const json& cfg);
BasisJob parse_basis(const json& cfg);
ProjectJob parse_project(const json& cfg);

struct RunResult {
  int exit_code = kExitOk;
  json report;
  std::vector<std::string> files;
};

RunResult run_geodesic(const json& cfg, const std::string& out_dir);
RunResult run_divergence(const json& cfg, const std::string& out_dir);
RunResult run_basis(const json& cfg, const std::string& out_dir);
RunResult run_project(const json& cfg, const std::string& out_dir);

// Dispatch by inv.command; config errors surface as ConfigError.
RunResult run(const Invocation& inv);

int main(int argc, char** argv);

}  // namespace gibbs::cli
