#include "lightjump/commands.hpp"

#include "lightjump/oracle1d.hpp"
#include "lightjump/scaling.hpp"
#include "lightjump/shooting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

namespace lightjump {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (in_row_++ > 0) buf_ += ',';
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  buf_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  sep();
  buf_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  sep();
  buf_ += s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw SolverError(ErrorCode::InvalidArgument, "CSV row has the wrong number of cells");
  buf_ += '\n';
  in_row_ = 0;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
      return kExitConfigInvalid;
    case ErrorCode::NoExitFound:
      return kExitNoExit;
    default:
      return kExitSolverFailure;
  }
}

void write_outputs(const CommandOutput& out, const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw SolverError(ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
    f << text;
  };
  for (const auto& [name, text] : out.files) put(name, text);
  put("summary.json", dump_json(out.summary));
  put("manifest.json", dump_json(cfg.manifest()));
}

namespace {

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// The stable fixed point named by task.start.
const FixedPoint& stable_point(const VectorFieldModel& model, int index) {
  if (index >= static_cast<int>(model.fixed_points.size()))
    throw SolverError(ErrorCode::ConfigInvalid, "task.start " + std::to_string(index) + " is not a fixed point index");
  const FixedPoint& fp = model.fixed_points[index];
  if (fp.stability != Stability::Stable)
    throw SolverError(ErrorCode::ConfigInvalid, "task.start must name a stable fixed point");
  return fp;
}

// Left basin boundary x1 = 0 for SN1, mirrored for SN2.
BasinBoundary boundary_for(const VectorFieldModel& model, const Eigen::VectorXd& start) {
  if (model.name != "maier_stein")
    throw SolverError(ErrorCode::ConfigInvalid, "no basin boundary known for model " + model.name);
  BasinBoundary b = maier_stein_left_basin_boundary();
  if (start[0] > 0.0) {
    b.description = "-x1 = 0";
    b.function = [](const Eigen::VectorXd& x) { return -x[0]; };
  }
  return b;
}

void path_rows(CsvWriter& csv, const PathRecord& rec, double t_offset, const std::string& last_event) {
  const std::size_t n = rec.samples.size();
  for (std::size_t k = 0; k < n; ++k) {
    const ExtendedState& s = rec.samples[k];
    csv.cell(s.t + t_offset);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) csv.cell(s.x[i]);
    for (Eigen::Index i = 0; i < s.p.size(); ++i) csv.cell(s.p[i]);
    csv.cell(s.w).cell(rec.hamiltonian[k]).cell(k + 1 == n ? last_event : std::string());
    csv.end_row();
  }
}

json path_summary(const PathRecord& rec) {
  return json{{"termination", rec.termination_label},
              {"exited", is_exit(rec)},
              {"exit_t", rec.exit_state.t},
              {"exit_x", vec_json(rec.exit_state.x)},
              {"exit_p", vec_json(rec.exit_state.p)},
              {"exit_w", rec.exit_state.w},
              {"h_drift", rec.h_drift},
              {"samples", rec.samples.size()},
              {"steps", rec.steps},
              {"rejected_steps", rec.rejected_steps}};
}

std::vector<std::string> path_header(int dim) {
  std::vector<std::string> h{"t"};
  for (int i = 1; i <= dim; ++i) h.push_back("x" + std::to_string(i));
  for (int i = 1; i <= dim; ++i) h.push_back("p" + std::to_string(i));
  for (const char* c : {"W", "H", "event"}) h.emplace_back(c);
  return h;
}

void cmd_fixed_points(const RunConfig& cfg, CommandOutput& out) {
  const VectorFieldModel model = cfg.make_model();
  std::vector<Interval> box;
  for (const auto& b : cfg.task["search_box"]) box.push_back({b[0].get<double>(), b[1].get<double>()});
  const auto fps = find_fixed_points(model, box, cfg.task["scan_step"].get<double>());
  json list = json::array();
  for (std::size_t i = 0; i < fps.size(); ++i) {
    json eig = json::array();
    for (Eigen::Index k = 0; k < fps[i].eigenvalues.size(); ++k)
      eig.push_back({{"re", fps[i].eigenvalues[k].real()}, {"im", fps[i].eigenvalues[k].imag()}});
    list.push_back({{"index", i},
                    {"location", vec_json(fps[i].location)},
                    {"stability", std::string(to_string(fps[i].stability))},
                    {"eigenvalues", eig},
                    {"residual", fps[i].residual}});
  }
  out.summary = {{"model", cfg.model}, {"fixed_points", list}};
}

// Nearest unstable fixed point on the `direction` side of a 1D start, if any.
std::optional<double> neighbour_saddle(const VectorFieldModel& model, double start, int direction) {
  std::optional<double> best;
  for (const auto& fp : model.fixed_points) {
    if (fp.stability == Stability::Stable) continue;
    const double x = fp.location[0];
    if ((x - start) * direction <= 0.0) continue;
    if (!best || std::abs(x - start) < std::abs(*best - start)) best = x;
  }
  return best;
}

void cmd_path(const RunConfig& cfg, CommandOutput& out) {
  const HamiltonianSystem sys = cfg.make_system();
  const VectorFieldModel& model = sys.model();
  const FixedPoint& start = stable_point(model, cfg.task["start"].get<int>());
  const bool two_d = model.dim == 2;
  const ShootingSettings settings = cfg.shooting_settings(two_d);

  PathRecord rec;
  if (!two_d) {
    const int direction = cfg.task["direction"].get<int>();
    const UnstableManifoldChart chart = build_chart(sys, start.location);
    if (const auto saddle = neighbour_saddle(model, start.location[0], direction))
      rec = shoot_to_saddle_1d(sys, chart, *saddle, settings);
    else
      rec = shoot_1d(sys, chart, direction, {}, settings);
  } else {
    const Shooter shooter(sys, boundary_for(model, start.location), settings, start.location);
    rec = shooter.shoot(cfg.task["theta"].get<double>());
  }

  CsvWriter csv(path_header(model.dim));
  path_rows(csv, rec, 0.0, rec.termination_label);
  json summary = path_summary(rec);
  summary["start"] = vec_json(start.location);

  if (cfg.task["continue"].get<bool>() && is_exit(rec)) {
    // Past the exit the momentum is zero: follow the drift into the next basin.
    ExtendedState from = rec.exit_state;
    from.t = 0.0;
    from.p.setZero();
    if (!two_d) {
      const double saddle = *neighbour_saddle(model, start.location[0], cfg.task["direction"].get<int>());
      from.x[0] = saddle + cfg.task["direction"].get<int>() * settings.proximity_radius;
    }
    std::vector<StopCondition> stops;
    for (const auto& fp : model.fixed_points)
      if (fp.stability == Stability::Stable && (fp.location - start.location).norm() > 0.0)
        stops.push_back(StopCondition::proximity(fp.location, settings.proximity_radius, "stable"));
    stops.push_back(StopCondition::max_time(cfg.task["continue_max_time"].get<double>()));
    IntegratorOptions opt = settings.integrator;
    const PathRecord cont = continue_deterministic(sys, from, stops, opt);
    path_rows(csv, cont, rec.exit_state.t, cont.termination_label);
    summary["continuation"] = path_summary(cont);
  }
  out.files["path.csv"] = csv.str();
  out.summary = summary;
}

json minima_json(const std::vector<ExtremalPath>& minima) {
  json a = json::array();
  for (const auto& m : minima) {
    double max_x2 = 0.0;
    for (const auto& s : m.path.samples) max_x2 = std::max(max_x2, std::abs(s.x[1]));
    a.push_back({{"theta", m.theta},
                 {"action", m.action},
                 {"most_probable", m.most_probable},
                 {"exit_x", vec_json(m.path.exit_state.x)},
                 {"max_abs_x2", max_x2},
                 {"h_drift", m.path.h_drift}});
  }
  return a;
}

void cmd_action_plot(const RunConfig& cfg, CommandOutput& out, int threads) {
  const HamiltonianSystem sys = cfg.make_system();
  const FixedPoint& start = stable_point(sys.model(), cfg.task["start"].get<int>());
  const BasinBoundary boundary = boundary_for(sys.model(), start.location);
  const Shooter shooter(sys, boundary, cfg.shooting_settings(true), start.location);
  const ActionPlot plot = action_plot(shooter, cfg.solver.n_theta, cfg.task["theta_lo"].get<double>(),
                                      cfg.task["theta_hi"].get<double>(), threads);

  CsvWriter csv({"theta", "action", "exit_x1", "exit_x2", "termination"});
  std::map<std::string, int> counts;
  for (const auto& e : plot.entries) {
    const bool has_x = e.exit_state.x.size() == 2;
    csv.cell(e.theta)
        .cell(e.action)
        .cell(has_x ? e.exit_state.x[0] : std::numeric_limits<double>::quiet_NaN())
        .cell(has_x ? e.exit_state.x[1] : std::numeric_limits<double>::quiet_NaN())
        .cell(e.termination);
    csv.end_row();
    ++counts[e.termination];
  }
  out.files["action_plot.csv"] = csv.str();
  out.summary = {{"boundary", plot.boundary}, {"periodic", plot.periodic}, {"terminations", counts}};

  const auto minima = find_minima(shooter, plot, cfg.solver.refine_tol, threads);
  out.summary["minima"] = minima_json(minima);
  out.summary["most_probable_count"] =
      std::count_if(minima.begin(), minima.end(), [](const ExtremalPath& m) { return m.most_probable; });

  if (cfg.task["extremals"].get<bool>()) {
    json clusters = json::array();
    for (const auto& target : boundary.exit_points) {
      for (const auto& c : extremals_to_point(shooter, cfg.solver.n_theta, target,
                                              cfg.task["extremal_tol"].get<double>(), threads))
        clusters.push_back({{"target", vec_json(target)},
                            {"theta", c.theta},
                            {"closest_approach", c.closest_approach},
                            {"action", c.action_at_approach},
                            {"members", c.members}});
    }
    out.summary["extremals"] = clusters;
  }
}

void cmd_quasipotential(const RunConfig& cfg, CommandOutput& out) {
  const HamiltonianSystem sys = cfg.make_system();
  const VectorFieldModel& model = sys.model();
  const ScalarField f = [&model](double x) { return model.f(Eigen::VectorXd::Constant(1, x))[0]; };
  const EffectiveIncrement g = on_axis_increment(sys, 0);
  const double lo = cfg.task["range"][0].get<double>();
  const double hi = cfg.task["range"][1].get<double>();
  const double step = cfg.task["step"].get<double>();
  const ShootingSettings settings = cfg.shooting_settings(false);

  json basins = json::array();
  for (std::size_t i = 0; i < model.fixed_points.size(); ++i) {
    const FixedPoint& fp = model.fixed_points[i];
    if (fp.stability != Stability::Stable) continue;
    const double anchor = fp.location[0];
    if (anchor < lo || anchor > hi) continue;
    const auto left = neighbour_saddle(model, anchor, -1);
    const auto right = neighbour_saddle(model, anchor, 1);
    const double a = left ? std::max(lo, *left) : lo;
    const double b = right ? std::min(hi, *right) : hi;

    // Lattice lo + k step inside the basin, plus its ends and the anchor itself.
    std::vector<double> grid{a, anchor, b};
    for (long k = static_cast<long>(std::ceil((a - lo) / step)); lo + k * step < b; ++k) {
      const double x = lo + k * step;
      if (x > a && x != anchor) grid.push_back(x);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const QuasiPotentialCurve curve = quasipotential(f, g, anchor, grid, cfg.solver.momentum_cap);
    CsvWriter csv({"x", "pstar", "W"});
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
      csv.cell(curve.grid[k]).cell(curve.pstar[k]).cell(curve.w[k]);
      csv.end_row();
    }
    const std::string name = "quasipotential_" + std::to_string(i) + ".csv";
    out.files[name] = csv.str();

    json saddles = json::array();
    const UnstableManifoldChart chart = build_chart(sys, fp.location);
    for (const auto& s : {left, right}) {
      if (!s) continue;
      const double w_oracle = quasipotential_at(f, g, anchor, *s, cfg.solver.momentum_cap);
      const PathRecord rec = shoot_to_saddle_1d(sys, chart, *s, settings);
      const bool reached = rec.termination_label == "saddle";
      json entry{{"x", *s}, {"w_oracle", w_oracle}, {"shooting_termination", rec.termination_label}};
      if (reached) {
        entry["w_shooting"] = rec.exit_state.w;
        entry["relative_delta"] = std::abs(rec.exit_state.w - w_oracle) / w_oracle;
      }
      saddles.push_back(entry);
    }
    basins.push_back({{"anchor_index", i}, {"anchor", anchor}, {"file", name}, {"saddles", saddles}});
  }
  out.summary = {{"basins", basins}};
}

std::vector<double> lambda_grid(double lo, double hi, int per_decade) {
  const int n = std::max(2, static_cast<int>(std::lround(per_decade * std::log10(hi / lo))) + 1);
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  grid.back() = hi;
  return grid;
}

void cmd_scaling(const RunConfig& cfg, CommandOutput& out, int threads) {
  const auto alphas = cfg.task["alphas"].get<std::vector<double>>();
  const auto lambdas = lambda_grid(cfg.task["lambda_lo"].get<double>(), cfg.task["lambda_hi"].get<double>(),
                                   cfg.task["points_per_decade"].get<int>());
  const DepthMethod method = depth_method_from_string(cfg.task["method"].get<std::string>());
  const bool two_d = cfg.model == "maier_stein";
  const ShootingSettings settings = cfg.shooting_settings(two_d);

  WellDepthFn depth;
  if (two_d) {
    const MaierSteinParams params{cfg.model_params.at("gamma")};
    const SaddleActionOptions opts{cfg.solver.n_theta, cfg.solver.refine_tol, 1};
    depth = [=](double alpha, double lambda) {
      return maier_stein_saddle_action(params, alpha, alpha, lambda, settings, opts);
    };
  } else {
    const EnergyBalanceParams params{cfg.model_params.at("Ch"), cfg.model_params.at("S0"),
                                     cfg.model_params.at("theta"), cfg.model_params.at("gamma")};
    depth = [=](double alpha, double lambda) { return climate_well_depth(params, alpha, lambda, method, settings); };
  }

  const ScalingTable table = sweep(depth, alphas, lambdas, cfg.model, std::string(to_string(method)), threads);
  CsvWriter csv({"alpha", "lambda", "W", "failure"});
  for (const auto& r : table.rows) {
    csv.cell(r.alpha).cell(r.lambda).cell(r.w).cell(r.failure);
    csv.end_row();
  }
  out.files["scaling_table.csv"] = csv.str();
  const auto failed = std::count_if(table.rows.begin(), table.rows.end(), [](const ScalingRow& r) { return !r.ok(); });
  out.summary = {{"rows", table.rows.size()}, {"failed_rows", failed}, {"lambdas", lambdas}};

  CAlphaFitOptions fit_opts;
  fit_opts.seed = cfg.task["fit_seed"].get<std::uint64_t>();
  fit_opts.starts = cfg.task["fit_starts"].get<int>();
  const ScalingFit fit = fit_scaling(table, fit_opts);

  json slopes = json::array();
  for (const auto& s : fit.slopes)
    slopes.push_back({{"alpha", s.alpha},
                      {"slope", s.slope},
                      {"slope_times_alpha", s.slope * s.alpha},
                      {"intercept", s.intercept},
                      {"r_squared", s.r_squared},
                      {"points", s.points}});
  json cvals = json::array();
  for (const auto& [a, c] : fit.c_values)
    cvals.push_back({{"alpha", a}, {"c", c}, {"c_fit", c_alpha(fit.c_fit.constants, a)}});
  const auto& k = fit.c_fit.constants;

  json predictions = json::array();
  for (const auto& p : cfg.task["held_out"]) {
    const double lambda = p[0].get<double>();
    const double alpha = p[1].get<double>();
    const Prediction pred = predict_w(fit, alpha, lambda);
    json entry{{"lambda", lambda}, {"alpha", alpha}, {"predicted", pred.value}, {"extrapolated", pred.extrapolated}};
    try {
      const double direct = depth(alpha, lambda);
      entry["direct"] = direct;
      entry["relative_error"] = std::abs(pred.value - direct) / direct;
    } catch (const SolverError& e) {
      entry["direct_failure"] = e.what();
    }
    predictions.push_back(entry);
  }

  out.summary["fit"] = {{"slopes", slopes},
                        {"exponent_fit", fit.exponent_fit},
                        {"exponent_rule", fit.exponent_rule},
                        {"c_values", cvals},
                        {"constants", {{"k1", k.k1}, {"k2", k.k2}, {"s1", k.s1}, {"s2", k.s2}}},
                        {"residual_rms", fit.c_fit.residual_rms},
                        {"converged_starts", fit.c_fit.converged_starts},
                        {"alpha_min", fit.alpha_min},
                        {"alpha_max", fit.alpha_max}};
  out.summary["predictions"] = predictions;
}

void cmd_forces(const RunConfig& cfg, CommandOutput& out, int threads) {
  const VectorFieldModel model = cfg.make_model();
  const FixedPoint& start = stable_point(model, cfg.task["start"].get<int>());
  const ShootingSettings settings = cfg.shooting_settings(true);

  CsvWriter csv({"alpha1", "path", "t", "p1", "p2"});
  json runs = json::array();
  for (const auto& a : cfg.task["alpha1"]) {
    const double alpha1 = a.get<double>();
    const HamiltonianSystem sys(model, {JumpSpec(cfg.noise[0].lambda, alpha1),
                                        JumpSpec(cfg.noise[1].lambda, cfg.noise[1].alpha)});
    const Shooter shooter(sys, boundary_for(model, start.location), settings, start.location);
    const ActionPlot plot = action_plot(shooter, cfg.solver.n_theta, threads);
    const auto minima = find_minima(shooter, plot, cfg.solver.refine_tol, threads);
    json paths = json::array();
    long long index = 0;
    for (const auto& m : minima) {
      if (!m.most_probable) continue;
      double max_p2 = 0.0;
      for (const auto& s : m.path.samples) {
        csv.cell(alpha1).cell(index).cell(s.t).cell(s.p[0]).cell(s.p[1]);
        csv.end_row();
        max_p2 = std::max(max_p2, std::abs(s.p[1]));
      }
      paths.push_back({{"path", index}, {"theta", m.theta}, {"action", m.action}, {"max_abs_p2", max_p2}});
      ++index;
    }
    runs.push_back({{"alpha1", alpha1}, {"most_probable", paths}, {"minima", minima.size()}});
  }
  out.files["forces.csv"] = csv.str();
  out.summary = {{"runs", runs}};
}

}  // namespace

void run_command(const RunConfig& cfg, int threads, CommandOutput& out) {
  threads = std::max(1, threads);
  if (cfg.command == "fixed-points") return cmd_fixed_points(cfg, out);
  if (cfg.command == "path") return cmd_path(cfg, out);
  if (cfg.command == "action-plot") return cmd_action_plot(cfg, out, threads);
  if (cfg.command == "quasipotential") return cmd_quasipotential(cfg, out);
  if (cfg.command == "scaling") return cmd_scaling(cfg, out, threads);
  if (cfg.command == "forces") return cmd_forces(cfg, out, threads);
  throw SolverError(ErrorCode::ConfigInvalid, "unknown command '" + cfg.command + "'");
}

}  // namespace lightjump
