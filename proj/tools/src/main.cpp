#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace casimir3::cli;
  CLI::App app{"Three-body Casimir optomechanics simulator"};
  app.require_subcommand(1);
  GlobalOptions options;
  std::uint64_t seed = 0;
  app.add_option("--config", options.config, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", options.out, "Output directory")->capture_default_str();
  app.add_option("--threads", options.threads, "Worker threads for tables and sweeps")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  const char* help[] = {
      "Force and center-plate force gradient along a separation sweep",
      "Eigenvalues of the three-mode Hamiltonian versus delta3",
      "Thermal PSD of every cantilever along a modulation sweep",
      "Steady-state A3/A1 along a sweep (switch or gain experiment)",
      "Separation and patch potential from a voltage sweep of frequency shifts",
      "Casimir force tables and the material permittivity",
  };
  for (std::size_t i = 0; i < subcommands().size(); ++i)
    app.add_subcommand(subcommands()[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }
  if (*seed_opt) options.seed = seed;

  try {
    const CommandResult result = run_command(app.get_subcommands().front()->get_name(), options);
    write_outputs(result, options.out);
    if (result.unstable_rows > 0)
      std::cerr << "casimir3: " << result.unstable_rows << " sweep row(s) unstable\n";
    return result.exit_code();
  } catch (...) {
    return report_current_exception();
  }
}
