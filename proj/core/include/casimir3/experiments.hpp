#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "casimir3/casimir_table.hpp"
#include "casimir3/dynamics.hpp"
#include "casimir3/reduced_model.hpp"
#include "casimir3/system_config.hpp"

namespace casimir3 {

// A validated configuration with its Casimir tables built and every
// "resonant" frequency resolved against the (effective) mode frequencies.
// Cheap to copy; tables are shared and immutable.
class PreparedSystem {
 public:
  static PreparedSystem prepare(const SystemConfig& config, int threads = 1);

  // Rebinds dynamic settings (modulation, drive, gain, noise, integrator,
  // seed) while reusing the tables. Throws ConfigError if a table-relevant
  // field (material, temperature, radii, grid) changed.
  PreparedSystem with(const SystemConfig& config) const;

  // Resolved configuration: "resonant" frequencies replaced by numbers.
  const SystemConfig& config() const { return config_; }
  // The configuration as given; sweeps derive rows from it so that
  // "resonant" frequencies follow the swept parameter.
  const SystemConfig& source_config() const { return source_; }
  const CasimirTable& table1() const { return *table1_; }
  const CasimirTable& table2() const { return *table2_; }

  // Cantilevers with the gain applied to cantilever 2.
  const Cantilevers& cantilevers() const { return cantilevers_; }
  const ReducedModel& model() const { return model_; }
  StabilityReport stability() const { return stability_check(model_); }

  SimulationSetup simulation_setup() const;

  // Static displacement of each cantilever away from its unloaded position.
  std::array<double, 3> equilibrium_offsets() const;

 private:
  PreparedSystem() = default;
  void resolve(const SystemConfig& config);

  SystemConfig source_;
  SystemConfig config_;
  std::shared_ptr<const CasimirTable> table1_;
  std::shared_ptr<const CasimirTable> table2_;
  Cantilevers cantilevers_;
  ReducedModel model_;
};

struct ExperimentOptions {
  // Refuse configurations whose reduced model does not decay.
  bool require_stable = true;
  bool keep_traces = true;
};

struct AmplitudeResult {
  TraceSet traces;                // trailing window only
  std::array<double, 3> amplitudes{};  // m
  std::array<double, 3> lines{};       // rad/s, demodulation frequencies
  double ratio = 0.0;                  // A3 / A1
  StabilityReport stability;
  double transient = 0.0;  // s
  double window = 0.0;     // s
  double drift = 0.0;      // largest half-window amplitude change checked
};

// Drives the target cantilever, integrates past the transient and
// demodulates each trace at its line in the drive chain
// (ω_d, ω_d + ωmod1, ω_d + ωmod1 - ωmod2 for a drive on cantilever 1) over
// the trailing quarter of the run. Throws SteadyStateError when the two
// halves of that window differ by more than 2%, InstabilityError when the
// reduced model grows (with require_stable) or the run diverges.
AmplitudeResult run_switch_experiment(const PreparedSystem& system,
                                      const ExperimentOptions& options = {});

// Same code path with the configured gain; requires G >= 0 and a positive
// stability margin.
AmplitudeResult run_gain_experiment(const PreparedSystem& system,
                                    const ExperimentOptions& options = {});

// Langevin run from rest: discards the settling transient, then records
// `duration` seconds. With noise disabled and no drive the traces are zero.
TraceSet run_thermal_psd(const PreparedSystem& system, double duration);

struct GrowthMeasurement {
  double rate = 0.0;       // 1/s, fitted amplitude growth rate (> 0 grows)
  double predicted = 0.0;  // 1/s, max Im λ of the reduced model
};

// Free evolution after a small kick on cantilever 1, taken as the difference
// from an unkicked run: least-squares slope of the log of the summed
// normalized oscillator energy over the second half of the run.
GrowthMeasurement measure_growth_rate(const PreparedSystem& system, double duration,
                                      double kick = 1e-12);

// Automatic settling time: max(20/min|γ_i|, 10/max|g|, 12/margin), capped.
double transient_time(const PreparedSystem& system);

// Quadrature demodulation with a Hann window: amplitude of the component
// at angular frequency w.
double demodulate(std::span<const double> trace, double sample_rate, double start_time,
                  double w);

// Absolute sweep values against a resolved configuration.
std::vector<double> sweep_values(const SweepSpec& sweep, const SystemConfig& resolved);

struct TransductionRow {
  double value = 0.0;  // sweep value, SI
  StabilityReport stability;
  std::optional<AmplitudeResult> result;  // absent when unstable or diverged
  std::optional<double> closed_form;      // Eq. (3)-type ratio on resonance
  // Set when a row classified stable still ran away in simulation (contact or
  // growth past the linear bound); holds the simulator's message.
  std::optional<std::string> divergence;
};

// One switch experiment (gain experiment when G > 0) per sweep value, rows
// computed concurrently from source_config() and returned in sweep order.
// Rows whose reduced model does not decay are reported without simulating,
// rows that diverge are reported with `divergence`; any other failure is
// rethrown with its sweep value. Noise, when enabled,
// uses derive_seed(seed, row).
std::vector<TransductionRow> sweep_transduction(const PreparedSystem& system,
                                                const SweepSpec& sweep, int threads = 1);

SystemConfig with_parameter(const SystemConfig& config, SweepParameter parameter, double value,
                            std::optional<double> delta_d2_ratio = std::nullopt);

}  // namespace casimir3
