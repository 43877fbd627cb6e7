// lightjump: exit paths and quasi-potentials under light-jump Levy noise.
//
//   lightjump <command> [--config FILE] [--out DIR] [--threads N] [--set section.key=value ...]
//
// LIGHTJUMP_THREADS sets the thread count when --threads is absent.

#include "lightjump/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace lj = lightjump;

int main(int argc, char** argv) {
  CLI::App app{"Most probable exit paths and quasi-potentials for light-jump Levy noise"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config with model/noise/solver/task sections")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (default: LIGHTJUMP_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "override one field, e.g. noise.1.lambda=0.5 or task.theta=0.1");

  for (const auto& name : lj::kCommands) app.add_subcommand(name, "run " + name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lj::kExitConfigInvalid;
  }

  if (threads == 0) {
    threads = 1;
    if (const char* env = std::getenv("LIGHTJUMP_THREADS")) {
      try {
        threads = std::max(1, std::stoi(env));
      } catch (const std::exception&) {
        std::cerr << "error: LIGHTJUMP_THREADS is not an integer\n";
        return lj::kExitConfigInvalid;
      }
    }
  }

  const std::string command = app.get_subcommands().front()->get_name();
  lj::RunConfig cfg;
  try {
    const nlohmann::json doc = config_path.empty() ? nlohmann::json::object() : lj::load_json_file(config_path);
    cfg = lj::parse_config(command, doc, overrides);
  } catch (const lj::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lj::kExitConfigInvalid;
  }

  lj::CommandOutput out;
  int status = lj::kExitOk;
  try {
    lj::run_command(cfg, threads, out);
  } catch (const lj::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    out.summary["error"] = {{"code", std::string(lj::to_string(e.code()))}, {"message", e.what()}};
    status = lj::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    out.summary["error"] = {{"code", "internal"}, {"message", e.what()}};
    status = lj::kExitInternal;
  }

  try {
    lj::write_outputs(out, cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lj::kExitInternal;
  }
  std::cout << lj::dump_json(out.summary);
  return status;
}
