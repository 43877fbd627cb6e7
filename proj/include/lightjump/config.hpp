#pragma once

#include "lightjump/hamiltonian.hpp"
#include "lightjump/shooting.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace lightjump {

/// Subcommands, each with its own task block schema.
inline const std::vector<std::string> kCommands{"fixed-points", "path", "action-plot", "quasipotential", "scaling",
                                                "forces"};

struct NoiseAxis {
  double lambda = 0.0;
  double alpha = 0.0;
};

struct SolverConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double conservation_tol = 1e-6;
  int conservation_retries = 2;
  double delta = 1e-3;             ///< 1D launch offset
  double radius = 1e-3;            ///< 2D launch circle radius
  int n_theta = 360;
  double refine_tol = 1e-6;
  double momentum_cap = 50.0;
  double max_time = 1e4;
  double proximity_radius = 1e-4;
  double escape_radius = 1e3;
};

/// A validated run description. Every field is explicit after parsing, so
/// `manifest()` reproduces the run on its own.
struct RunConfig {
  std::string command;
  std::string model;
  std::map<std::string, double> model_params;
  std::vector<NoiseAxis> noise;
  SolverConfig solver;
  nlohmann::json task;             ///< command-specific block, defaults filled in

  [[nodiscard]] nlohmann::json manifest() const;
  [[nodiscard]] VectorFieldModel make_model() const;
  [[nodiscard]] HamiltonianSystem make_system() const;
  [[nodiscard]] ShootingSettings shooting_settings(bool two_dimensional) const;
};

/// Default task block for a command and model (the schema: any other key is rejected).
nlohmann::json default_task(const std::string& command, const std::string& model);

/// Default noise per axis for a model.
std::vector<NoiseAxis> default_noise(const std::string& model);

/// Builds a RunConfig from a (possibly partial) document and `section.key=value`
/// overrides, whose values are parsed as JSON with a plain-string fallback.
/// Throws ConfigInvalid on unknown keys, wrong types or invalid values.
RunConfig parse_config(const std::string& command, const nlohmann::json& doc,
                       const std::vector<std::string>& overrides = {});

/// Reads a JSON file; a missing or malformed file is ConfigInvalid.
nlohmann::json load_json_file(const std::string& path);

}  // namespace lightjump
