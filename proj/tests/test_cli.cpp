#include "lightjump/commands.hpp"
#include "lightjump/config.hpp"

#include <doctest.h>

#include <charconv>
#include <cmath>

using namespace lightjump;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SolverError& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::string run_bytes(const RunConfig& cfg, int threads) {
  CommandOutput out;
  run_command(cfg, threads, out);
  std::string all;
  for (const auto& [name, text] : out.files) all += name + "\n" + text;
  return all + dump_json(out.summary) + dump_json(cfg.manifest());
}

}  // namespace

TEST_CASE("doubles print shortest and round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-12) == "1e-12");
  CHECK(format_double(-3.0) == "-3");
  for (double v : {1.0 / 3.0, 264.89864185301036, 4.47474891885e-4, 1e300}) {
    double back = 0.0;
    const std::string s = format_double(v);
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("csv rows must be complete") {
  CsvWriter w({"a", "b"});
  w.cell(1.5).cell(std::string("x"));
  w.end_row();
  CHECK(w.str() == "a,b\n1.5,x\n");
  w.cell(2.0);
  CHECK_THROWS_AS(w.end_row(), SolverError);
}

TEST_CASE("defaults are explicit in the manifest") {
  const RunConfig cfg = parse_config("path", json::object());
  const json m = cfg.manifest();
  CHECK(m["command"] == "path");
  CHECK(m["model"]["name"] == "energy_balance");
  CHECK(m["model"]["params"]["gamma"] == 0.61);
  CHECK(m["noise"][0]["lambda"] == 0.68);
  CHECK(m["noise"][0]["alpha"] == 1.83);
  CHECK(m["solver"]["rtol"] == 1e-10);
  CHECK(m["solver"]["n_theta"] == 360);
  CHECK(m["task"]["direction"] == 1);
  // Re-parsing the manifest is a fixed point.
  CHECK(parse_config("path", m).manifest() == m);
}

TEST_CASE("unknown keys and wrong types are rejected") {
  auto bad = [](const char* text, const std::string& cmd = "path") {
    return code_of([&] { (void)parse_config(cmd, json::parse(text)); });
  };
  CHECK(bad(R"({"solvr": {}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"solver": {"rtoll": 1e-9}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"solver": {"rtol": "tight"}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"solver": {"n_theta": 2.5}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"task": {"bogus": 1}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"model": {"name": "lorenz"}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"model": {"params": {"beta": 1}}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"model": {"params": {"gamma": 2}}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"noise": [{"lambda": 1, "alpha": 1.8}, {"lambda": 1, "alpha": 1.8}]})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"noise": [{"lambda": -1}]})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"task": {"direction": 0}})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({})", "action-plot") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({"command": "forces"})") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"({})", "plot") == ErrorCode::ConfigInvalid);
  CHECK(bad(R"([1, 2])") == ErrorCode::ConfigInvalid);
}

TEST_CASE("overrides map one-to-one onto fields") {
  const RunConfig cfg = parse_config("action-plot", json::object(),
                                     {"model.name=maier_stein", "model.gamma=5", "noise.2.alpha=3.5",
                                      "solver.n_theta=90", "task.extremals=true"});
  CHECK(cfg.model == "maier_stein");
  CHECK(cfg.model_params.at("gamma") == 5.0);
  CHECK(cfg.noise[1].alpha == 3.5);
  CHECK(cfg.noise[0].alpha == 1.5);
  CHECK(cfg.solver.n_theta == 90);
  CHECK(cfg.task["extremals"] == true);
  CHECK(code_of([] { (void)parse_config("path", json::object(), {"solver.rtol"}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)parse_config("path", json::object(), {"solver.nope=1"}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)parse_config("path", json::object(), {"io.x=1"}); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("exit codes are distinct") {
  CHECK(exit_code(ErrorCode::ConfigInvalid) == kExitConfigInvalid);
  CHECK(exit_code(ErrorCode::NoExitFound) == kExitNoExit);
  CHECK(exit_code(ErrorCode::StepUnderflow) == kExitSolverFailure);
  CHECK(kExitConfigInvalid != kExitSolverFailure);
  CHECK(kExitNoExit != kExitSolverFailure);
}

TEST_CASE("fixed-points summary") {
  CommandOutput out;
  run_command(parse_config("fixed-points", json::object()), 1, out);
  CHECK(out.summary["fixed_points"].size() == 3);
  CommandOutput mono;
  run_command(parse_config("fixed-points", json::object(), {"model.gamma=1.0"}), 1, mono);
  CHECK(mono.summary["fixed_points"].size() == 1);
}

TEST_CASE("path output: header, exit row and continuation") {
  CommandOutput out;
  run_command(parse_config("path", json::object()), 1, out);
  const std::string& csv = out.files.at("path.csv");
  CHECK(csv.rfind("t,x1,p1,W,H,event\n", 0) == 0);
  CHECK(csv.find(",saddle\n") != std::string::npos);
  CHECK(csv.find(",stable\n") != std::string::npos);
  CHECK(out.summary["exit_w"].get<double>() == doctest::Approx(11.70772467).epsilon(1e-8));
  CHECK(out.summary["continuation"]["exit_w"] == out.summary["exit_w"]);
}

TEST_CASE("identical configs give identical bytes, whatever the thread count") {
  const RunConfig plot = parse_config("action-plot", json::object(),
                                      {"model.name=maier_stein", "model.gamma=5", "solver.n_theta=48"});
  const std::string a = run_bytes(plot, 1);
  CHECK(a == run_bytes(plot, 1));
  CHECK(a == run_bytes(plot, 4));
  const RunConfig scaling = parse_config("scaling", json::object(), {"task.points_per_decade=3"});
  CHECK(run_bytes(scaling, 1) == run_bytes(scaling, 3));
}
