#pragma once

#include "lightjump/config.hpp"
#include "lightjump/error.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lightjump {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Comma-separated rows with a fixed header; numbers go through format_double.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& s);
  void end_row();

  [[nodiscard]] const std::string& str() const noexcept { return buf_; }

 private:
  void sep();

  std::string buf_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

/// Files produced by one run, keyed by file name. Filled as the command goes, so a
/// command that throws half way still leaves its partial outputs behind.
struct CommandOutput {
  std::map<std::string, std::string> files;
  nlohmann::json summary = nlohmann::json::object();
};

/// Runs `cfg.command`, adding CSV files and the summary to `out`. Errors propagate.
void run_command(const RunConfig& cfg, int threads, CommandOutput& out);

/// Writes every file plus summary.json and manifest.json into `dir` (created if missing).
void write_outputs(const CommandOutput& out, const RunConfig& cfg, const std::filesystem::path& dir);

/// JSON text with sorted keys, two-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);

/// Process exit status for an error code.
int exit_code(ErrorCode code) noexcept;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitNoExit = 4;

}  // namespace lightjump
