#include "lightjump/config.hpp"

#include "lightjump/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lightjump {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw SolverError(ErrorCode::ConfigInvalid, msg); }

json solver_to_json(const SolverConfig& s) {
  return json{{"rtol", s.rtol},
              {"atol", s.atol},
              {"conservation_tol", s.conservation_tol},
              {"conservation_retries", s.conservation_retries},
              {"delta", s.delta},
              {"radius", s.radius},
              {"n_theta", s.n_theta},
              {"refine_tol", s.refine_tol},
              {"momentum_cap", s.momentum_cap},
              {"max_time", s.max_time},
              {"proximity_radius", s.proximity_radius},
              {"escape_radius", s.escape_radius}};
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  if (a.is_array() && b.is_array()) return true;
  return a.type() == b.type();
}

// Overlays `user` onto `base`, rejecting keys absent from `base` and values of another kind.
void overlay(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : user.items()) {
    if (!base.contains(key)) invalid("unknown key '" + key + "' in " + where);
    if (!same_kind(base[key], value)) invalid("wrong type for " + where + "." + key);
    base[key] = value;
  }
}

double positive(const json& v, const std::string& name) {
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) invalid(name + " must be positive and finite");
  return x;
}

int positive_int(const json& v, const std::string& name) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) invalid(name + " must be a positive integer");
  return v.get<int>();
}

SolverConfig solver_from_json(const json& j) {
  SolverConfig s;
  s.rtol = positive(j["rtol"], "solver.rtol");
  s.atol = positive(j["atol"], "solver.atol");
  s.conservation_tol = positive(j["conservation_tol"], "solver.conservation_tol");
  if (!j["conservation_retries"].is_number_integer() || j["conservation_retries"].get<int>() < 0)
    invalid("solver.conservation_retries must be a non-negative integer");
  s.conservation_retries = j["conservation_retries"].get<int>();
  s.delta = positive(j["delta"], "solver.delta");
  s.radius = positive(j["radius"], "solver.radius");
  s.n_theta = positive_int(j["n_theta"], "solver.n_theta");
  if (s.n_theta < 8) invalid("solver.n_theta must be at least 8");
  s.refine_tol = positive(j["refine_tol"], "solver.refine_tol");
  s.momentum_cap = positive(j["momentum_cap"], "solver.momentum_cap");
  s.max_time = positive(j["max_time"], "solver.max_time");
  s.proximity_radius = positive(j["proximity_radius"], "solver.proximity_radius");
  s.escape_radius = positive(j["escape_radius"], "solver.escape_radius");
  return s;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

void check_number_list(const json& v, const std::string& name, bool allow_empty) {
  if (!v.is_array() || (!allow_empty && v.empty())) invalid(name + " must be a non-empty list of numbers");
  for (const auto& x : v)
    if (!x.is_number()) invalid(name + " must contain numbers only");
}

void validate_task(const std::string& command, const json& t, int dim) {
  if ((command == "action-plot" || command == "forces") && dim != 2) invalid(command + " needs a two-dimensional model");
  if (command == "quasipotential" && dim != 1) invalid("quasipotential needs a one-dimensional model");
  if (t.contains("start") && (!t["start"].is_number_integer() || t["start"].get<int>() < 0))
    invalid("task.start must be a fixed-point index");
  if (command == "fixed-points") {
    positive(t["scan_step"], "task.scan_step");
    if (static_cast<int>(t["search_box"].size()) != dim) invalid("task.search_box needs one [lo, hi] per axis");
    for (const auto& b : t["search_box"]) {
      check_number_list(b, "task.search_box entry", false);
      if (b.size() != 2 || !(b[1].get<double>() > b[0].get<double>())) invalid("task.search_box entries must be [lo, hi]");
    }
  } else if (command == "path") {
    const int dir = t["direction"].get<int>();
    if (dir != 1 && dir != -1) invalid("task.direction must be 1 or -1");
  } else if (command == "action-plot") {
    if (!(t["theta_hi"].get<double>() > t["theta_lo"].get<double>())) invalid("task.theta_hi must exceed task.theta_lo");
    positive(t["extremal_tol"], "task.extremal_tol");
  } else if (command == "quasipotential") {
    positive(t["step"], "task.step");
    check_number_list(t["range"], "task.range", false);
    if (t["range"].size() != 2 || !(t["range"][1].get<double>() > t["range"][0].get<double>()))
      invalid("task.range must be [lo, hi] with lo < hi");
  } else if (command == "scaling") {
    const std::string method = t["method"].get<std::string>();
    if (method != "oracle" && method != "shooting") invalid("task.method must be 'oracle' or 'shooting'");
    if (method == "oracle" && dim != 1) invalid("the oracle method is available for 1D models only");
    check_number_list(t["alphas"], "task.alphas", false);
    for (const auto& a : t["alphas"])
      if (!(a.get<double>() > 1.0)) invalid("task.alphas must exceed 1");
    const double lo = positive(t["lambda_lo"], "task.lambda_lo");
    const double hi = positive(t["lambda_hi"], "task.lambda_hi");
    if (!(hi > lo)) invalid("task.lambda_hi must exceed task.lambda_lo");
    positive_int(t["points_per_decade"], "task.points_per_decade");
    positive_int(t["fit_starts"], "task.fit_starts");
    if (!t["fit_seed"].is_number_integer() || t["fit_seed"].get<long long>() < 0)
      invalid("task.fit_seed must be a non-negative integer");
    if (!t["held_out"].is_array()) invalid("task.held_out must be a list of [lambda, alpha] pairs");
    for (const auto& p : t["held_out"]) {
      check_number_list(p, "task.held_out entry", false);
      if (p.size() != 2) invalid("task.held_out entries must be [lambda, alpha]");
    }
  } else if (command == "forces") {
    check_number_list(t["alpha1"], "task.alpha1", false);
  }
}

}  // namespace

std::vector<NoiseAxis> default_noise(const std::string& model) {
  if (model == "energy_balance") return {{0.68, 1.83}};
  if (model == "maier_stein") return {{0.1, 1.5}, {0.1, 1.5}};
  invalid("unknown model '" + model + "'");
}

json default_task(const std::string& command, const std::string& model) {
  const bool climate = model == "energy_balance";
  if (command == "fixed-points") {
    if (climate) return json{{"search_box", json::array({json::array({200.0, 320.0})})}, {"scan_step", 0.1}};
    return json{{"search_box", json::array({json::array({-2.0, 2.0}), json::array({-2.0, 2.0})})}, {"scan_step", 0.1}};
  }
  if (command == "path")
    return json{{"start", 0}, {"direction", 1}, {"theta", 0.0}, {"continue", climate}, {"continue_max_time", 1e3}};
  if (command == "action-plot")
    return json{{"start", 0},
                {"theta_lo", 0.0},
                {"theta_hi", 2.0 * std::numbers::pi},
                {"extremals", false},
                {"extremal_tol", 1e-2}};
  if (command == "quasipotential") return json{{"range", json::array({200.0, 320.0})}, {"step", 0.5}};
  if (command == "scaling") {
    if (climate)
      return json{{"method", "oracle"},
                  {"alphas", json::array({1.5, 2.0, 2.5, 3.0, 3.5})},
                  {"lambda_lo", 1e-3},
                  {"lambda_hi", 1e-2},
                  {"points_per_decade", 8},
                  {"fit_seed", 20240607},
                  {"fit_starts", 20},
                  {"held_out", json::array({json::array({0.68, 1.83})})}};
    return json{{"method", "shooting"},
                {"alphas", json::array({1.5, 2.0, 2.5, 3.0, 3.5, 4.0})},
                {"lambda_lo", 0.05},
                {"lambda_hi", 0.5},
                {"points_per_decade", 8},
                {"fit_seed", 20240607},
                {"fit_starts", 20},
                {"held_out", json::array()}};
  }
  if (command == "forces") return json{{"start", 0}, {"alpha1", json::array({1.5, 2.0, 2.5, 3.5})}};
  invalid("unknown command '" + command + "'");
}

RunConfig parse_config(const std::string& command, const json& doc, const std::vector<std::string>& overrides) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    invalid("unknown command '" + command + "'");
  json d = doc.is_null() ? json::object() : doc;
  if (!d.is_object()) invalid("config must be a JSON object");

  // Overrides are applied to the raw document first so that they can name any field.
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      invalid("override '" + o + "' is not of the form section.key=value");
    const std::string section = o.substr(0, dot);
    const std::string key = o.substr(dot + 1, eq - dot - 1);
    const json value = parse_override_value(o.substr(eq + 1));
    if (section == "model" && key == "name") {
      d["model"]["name"] = value;
    } else if (section == "model") {
      d["model"]["params"][key] = value;
    } else if (section == "noise") {
      // noise.<axis>.lambda / noise.<axis>.alpha, axis counted from 1
      const auto dot2 = key.find('.');
      if (dot2 == std::string::npos) invalid("noise overrides look like noise.1.lambda=0.5");
      int axis = 0;
      try {
        axis = std::stoi(key.substr(0, dot2));
      } catch (const std::exception&) {
        invalid("bad noise axis in '" + o + "'");
      }
      if (axis < 1) invalid("noise axes are counted from 1");
      if (!d.contains("noise")) {
        const std::string model = d.contains("model") && d["model"].contains("name") && d["model"]["name"].is_string()
                                      ? d["model"]["name"].get<std::string>()
                                      : "energy_balance";
        d["noise"] = json::array();
        for (const auto& n : default_noise(model)) d["noise"].push_back({{"lambda", n.lambda}, {"alpha", n.alpha}});
      }
      if (!d["noise"].is_array() || static_cast<int>(d["noise"].size()) < axis) invalid("noise axis out of range");
      d["noise"][axis - 1][key.substr(dot2 + 1)] = value;
    } else if (section == "solver" || section == "task") {
      d[section][key] = value;
    } else {
      invalid("unknown override section '" + section + "'");
    }
  }

  for (const auto& [key, value] : d.items())
    if (key != "command" && key != "model" && key != "noise" && key != "solver" && key != "task")
      invalid("unknown top-level key '" + key + "'");
  if (d.contains("command") && d["command"] != command)
    invalid("config was written for '" + d["command"].dump() + "', not '" + command + "'");

  RunConfig cfg;
  cfg.command = command;

  json model = json{{"name", "energy_balance"}, {"params", json::object()}};
  if (d.contains("model")) {
    if (!d["model"].is_object()) invalid("model must be an object");
    for (const auto& [key, value] : d["model"].items())
      if (key != "name" && key != "params") invalid("unknown key '" + key + "' in model");
    if (d["model"].contains("name")) {
      if (!d["model"]["name"].is_string()) invalid("model.name must be a string");
      model["name"] = d["model"]["name"];
    }
    if (d["model"].contains("params")) model["params"] = d["model"]["params"];
  }
  cfg.model = model["name"].get<std::string>();
  if (cfg.model != "energy_balance" && cfg.model != "maier_stein") invalid("unknown model '" + cfg.model + "'");
  cfg.model_params = default_model_params(cfg.model);
  if (!model["params"].is_object()) invalid("model.params must be an object");
  for (const auto& [key, value] : model["params"].items()) {
    if (!cfg.model_params.contains(key)) invalid("unknown parameter '" + key + "' for model " + cfg.model);
    if (!value.is_number()) invalid("model parameter '" + key + "' must be a number");
    cfg.model_params[key] = value.get<double>();
  }
  const VectorFieldModel vf = cfg.make_model();   // validates parameter ranges

  cfg.noise = default_noise(cfg.model);
  if (d.contains("noise")) {
    const json& n = d["noise"];
    if (!n.is_array() || static_cast<int>(n.size()) != vf.dim)
      invalid("noise must list one {lambda, alpha} entry per model axis (" + std::to_string(vf.dim) + ")");
    for (std::size_t i = 0; i < n.size(); ++i) {
      json axis{{"lambda", cfg.noise[i].lambda}, {"alpha", cfg.noise[i].alpha}};
      overlay(axis, n[i], "noise[" + std::to_string(i) + "]");
      cfg.noise[i] = {axis["lambda"].get<double>(), axis["alpha"].get<double>()};
      try {
        JumpSpec(cfg.noise[i].lambda, cfg.noise[i].alpha);
      } catch (const SolverError& e) {
        invalid(e.what());
      }
    }
  }

  json solver = solver_to_json(SolverConfig{});
  if (d.contains("solver")) overlay(solver, d["solver"], "solver");
  cfg.solver = solver_from_json(solver);

  cfg.task = default_task(command, cfg.model);
  if (d.contains("task")) overlay(cfg.task, d["task"], "task");
  validate_task(command, cfg.task, vf.dim);
  return cfg;
}

json RunConfig::manifest() const {
  json noise_json = json::array();
  for (const auto& n : noise) noise_json.push_back({{"lambda", n.lambda}, {"alpha", n.alpha}});
  json params = json::object();
  for (const auto& [k, v] : model_params) params[k] = v;
  return json{{"command", command},
              {"model", {{"name", model}, {"params", params}}},
              {"noise", noise_json},
              {"solver", solver_to_json(solver)},
              {"task", task}};
}

VectorFieldModel RunConfig::make_model() const {
  try {
    return lightjump::make_model(model, model_params);
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::InvalidArgument) invalid(e.what());
    throw;
  }
}

HamiltonianSystem RunConfig::make_system() const {
  std::vector<JumpSpec> specs;
  for (const auto& n : noise) specs.emplace_back(n.lambda, n.alpha);
  return HamiltonianSystem(make_model(), specs);
}

ShootingSettings RunConfig::shooting_settings(bool two_dimensional) const {
  ShootingSettings s;
  s.radius = two_dimensional ? solver.radius : solver.delta;
  s.proximity_radius = solver.proximity_radius;
  s.max_time = solver.max_time;
  s.momentum_cap = solver.momentum_cap;
  s.escape_radius = solver.escape_radius;
  s.integrator.tol = {solver.rtol, solver.atol};
  s.integrator.conservation_tol = solver.conservation_tol;
  s.integrator.conservation_retries = solver.conservation_retries;
  return s;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    invalid("config file " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace lightjump
