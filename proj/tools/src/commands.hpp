#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "casimir3/system_config.hpp"

namespace casimir3::cli {

// Exit codes of the casimir3 executable.
enum ExitCode : int {
  kSuccess = 0,
  kConfigFailure = 2,
  kNumericalFailure = 3,
  kUnstableRows = 4,
};

struct OutputFile {
  std::string name;
  std::string contents;
};

// Everything a subcommand produces, held in memory until the command has
// succeeded so that failures leave no partial output behind.
struct CommandResult {
  std::vector<OutputFile> files;
  nlohmann::json manifest;
  int unstable_rows = 0;
  int exit_code() const { return unstable_rows > 0 ? kUnstableRows : kSuccess; }
};

struct GlobalOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "casimir3-out";
  int threads = 1;
};

// Subcommand names in the order they are listed by --help.
const std::vector<std::string>& subcommands();

CommandResult cmd_force_curve(const SystemConfig& config, int threads);
CommandResult cmd_eigen_sweep(const SystemConfig& config, int threads);
CommandResult cmd_spectrogram(const SystemConfig& config, int threads);
CommandResult cmd_transduction(const SystemConfig& config, int threads);
CommandResult cmd_calibrate(const SystemConfig& config);
CommandResult cmd_material_table(const SystemConfig& config, int threads);

// Loads the configuration, applies --seed, runs `subcommand`.
CommandResult run_command(const std::string& subcommand, const GlobalOptions& options);

// Writes every file (plus config.json and manifest.json, already in
// `result.files`) into `dir`, each through a temporary name and a rename.
void write_outputs(const CommandResult& result, const std::filesystem::path& dir);

// Maps the active exception onto an exit code and prints it to stderr.
int report_current_exception();

}  // namespace casimir3::cli
