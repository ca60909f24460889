#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "casimir3/cantilever.hpp"
#include "casimir3/casimir_table.hpp"
#include "casimir3/geometry.hpp"
#include "casimir3/material.hpp"

namespace casimir3 {

struct ModulationSettings {
  double omega_mod1 = 0.0;  // rad/s
  double omega_mod2 = 0.0;  // rad/s
  double delta_d1 = 0.0;    // m
  double delta_d2 = 0.0;    // m

  // Amplitudes >= 0 and below half the smaller gap.
  void validate(const Geometry& geom) const;
};

struct DriveSettings {
  int target = 1;           // 1..3
  double amplitude = 0.0;   // N
  double frequency = 0.0;   // rad/s
  double phase = 0.0;       // rad
};

struct NoiseSettings {
  bool enabled = false;
  double temperature = 300.0;  // K
};

struct IntegratorSettings {
  double sample_rate = 25600.0;  // Hz, rate of the recorded traces
  double duration = 0.0;         // s; 0 picks the run length automatically
  int steps_per_sample = 0;      // 0: smallest count with dt <= 1/(200 f_max)
  double max_transient = 240.0;  // s, cap on the automatic transient
};

// Which frequencies are derived from the (effective) natural frequencies
// instead of being taken literally.
struct ResonanceFlags {
  bool omega_mod1 = false;  // omega_mod1 = omega_2 - omega_1
  bool omega_mod2 = false;  // omega_mod2 = omega_1 + omega_mod1 - omega_3
  bool drive = false;       // drive frequency = omega of the driven cantilever
};

enum class ForceCurveMode { MoveCenter, MoveFirst, MoveThird };

struct ForceCurveSpec {
  ForceCurveMode mode = ForceCurveMode::MoveCenter;
  double total = 760e-9;   // m, d1 + d2 for MoveCenter
  double fixed = 276e-9;   // m, the gap held fixed for MoveFirst / MoveThird
  std::vector<double> values;  // m, swept gap (d1 for MoveCenter/MoveFirst, d2 for MoveThird)
};

struct EigenSweepSpec {
  std::vector<double> delta3;          // rad/s
  double delta2 = 0.0;                 // rad/s
  std::optional<double> g12;           // rad/s; from the modulation when absent
  std::optional<double> g23;           // rad/s
  bool include_damping = true;
};

enum class SweepParameter { OmegaMod1, OmegaMod2, Gain, DeltaD1, DeltaD2, DriveAmplitude };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::OmegaMod2;
  std::vector<double> values;          // SI (rad/s, m, N)
  // Values are offsets from the parameter's resolved base value.
  bool relative = false;
  // When set, delta_d2 follows delta_d1 with this factor in delta_d1 sweeps.
  std::optional<double> delta_d2_ratio;
};

struct SpectrogramSpec {
  SweepSpec sweep;
  double duration = 64.0;          // s of recorded data per row
  double segment = 8.0;            // s, Welch segment length
  double band_low = 4000.0;        // Hz, exported frequency band
  double band_high = 7000.0;       // Hz
};

struct CalibrationSpec {
  int cantilever = 2;              // whose omega_0 and k convert the shifts
  std::string records_file;        // CSV V_ext_V,delta_omega_rad_s
};

struct SystemConfig {
  std::string figure;  // optional preset id forwarded to the manifest
  std::array<CantileverParams, 3> cantilevers;
  Geometry geometry;
  MaterialModel material = MaterialModel::gold_drude();
  double temperature = 300.0;  // K
  TableGrid table;
  ModulationSettings modulation;
  ResonanceFlags resonant;
  DriveSettings drive;
  double gain = 0.0;  // rad/s, applied to cantilever 2
  NoiseSettings noise;
  IntegratorSettings integrator;
  bool use_effective_frequencies = true;
  // Exact modulation averages in the effective-frequency model; off keeps the
  // first-order (linear in δd) coupling and statically dressed modes.
  bool modulation_corrections = true;
  std::uint64_t seed = 1;

  std::optional<ForceCurveSpec> force_curve;
  std::optional<EigenSweepSpec> eigen_sweep;
  std::optional<SpectrogramSpec> spectrogram;
  std::optional<SweepSpec> transduction;
  std::optional<CalibrationSpec> calibration;

  // Cantilevers 1 and 3 carry the spheres; their radii mirror geometry.R1/R2.
  std::array<CantileverParams, 3> cantilevers_with_spheres() const;

  // Every module-level invariant; throws ConfigError with a key path.
  void validate() const;
};

// Cantilever estimates used when a configuration gives no stiffness/mass.
// Frequencies and dampings are the measured ones; outer stiffness is the
// Euler-Bernoulli value for a 450 x 50 x 2 um silicon beam, the center one is
// sized so the Casimir-softened difference frequency at 100/105 nm, with the
// default 6/8.5 nm modulation, is 2π x 465 Hz.
std::array<CantileverParams, 3> default_cantilevers();

// Fig. 3 style defaults: 100/105 nm gaps, 35 um spheres, Drude gold at 300 K.
SystemConfig default_config();

}  // namespace casimir3
