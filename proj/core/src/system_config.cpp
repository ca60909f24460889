#include "casimir3/system_config.hpp"

#include <cmath>
#include <string>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

namespace {

// Silicon beam 450 x 50 x 2 um, E = 169 GPa.
constexpr double kOuterStiffness = 0.18545953360768176;  // N/m
constexpr double kCenterStiffness = 0.106653922922;      // N/m

void check_sweep(const SweepSpec& s, const std::string& key) {
  if (s.values.empty()) throw ConfigError("sweep needs at least one value", key);
  for (double v : s.values)
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite", key);
  if (!s.relative) {
    for (double v : s.values)
      if (v < 0.0) throw ConfigError("sweep values must be >= 0", key);
  }
  if (s.delta_d2_ratio && !(*s.delta_d2_ratio >= 0.0))
    throw ConfigError("must be >= 0", key + ".delta_d2_ratio");
}

}  // namespace

void ModulationSettings::validate(const Geometry& geom) const {
  if (!(omega_mod1 >= 0.0) || !std::isfinite(omega_mod1))
    throw ConfigError("must be >= 0", "modulation.omega_mod1_hz");
  if (!(omega_mod2 >= 0.0) || !std::isfinite(omega_mod2))
    throw ConfigError("must be >= 0", "modulation.omega_mod2_hz");
  const double limit = 0.5 * std::min(geom.d1, geom.d2);
  if (!(delta_d1 >= 0.0 && delta_d1 < limit))
    throw ConfigError("must lie in [0, min(d1, d2)/2)", "modulation.delta_d1_nm");
  if (!(delta_d2 >= 0.0 && delta_d2 < limit))
    throw ConfigError("must lie in [0, min(d1, d2)/2)", "modulation.delta_d2_nm");
}

std::array<CantileverParams, 3> SystemConfig::cantilevers_with_spheres() const {
  auto out = cantilevers;
  out[0].sphere_radius = geometry.R1;
  out[1].sphere_radius.reset();
  out[2].sphere_radius = geometry.R2;
  return out;
}

void SystemConfig::validate() const {
  for (std::size_t i = 0; i < 3; ++i)
    cantilevers[i].validate(("cantilevers[" + std::to_string(i) + "]").c_str());
  geometry.validate();
  if (!(temperature >= 0.0)) throw ConfigError("must be >= 0", "temperature_k");
  if (table.points < 4) throw ConfigError("needs at least 4 points", "table.points");
  if (!(table.min_separation > 0.0 && table.max_separation > table.min_separation))
    throw ConfigError("needs 0 < min < max", "table");
  if (geometry.d1 < table.min_separation || geometry.d1 > table.max_separation)
    throw ConfigError("outside the table range", "geometry.d1_nm");
  if (geometry.d2 < table.min_separation || geometry.d2 > table.max_separation)
    throw ConfigError("outside the table range", "geometry.d2_nm");
  modulation.validate(geometry);
  if (drive.target < 1 || drive.target > 3) throw ConfigError("must be 1, 2 or 3", "drive.target");
  if (!(drive.amplitude >= 0.0)) throw ConfigError("must be >= 0", "drive.amplitude_n");
  if (!(drive.frequency >= 0.0)) throw ConfigError("must be >= 0", "drive.frequency_hz");
  if (!std::isfinite(drive.phase)) throw ConfigError("must be finite", "drive.phase_rad");
  if (!(gain >= 0.0)) throw ConfigError("must be >= 0", "gain_hz");
  if (!(noise.temperature >= 0.0)) throw ConfigError("must be >= 0", "noise.temperature_k");
  if (!(integrator.sample_rate > 0.0)) throw ConfigError("must be > 0", "integrator.sample_rate_hz");
  if (!(integrator.duration >= 0.0)) throw ConfigError("must be >= 0", "integrator.duration_s");
  if (integrator.steps_per_sample < 0)
    throw ConfigError("must be >= 0", "integrator.steps_per_sample");
  if (!(integrator.max_transient > 0.0))
    throw ConfigError("must be > 0", "integrator.max_transient_s");
  // Nyquist must clear every line of interest.
  double f_max = 0.0;
  for (const auto& c : cantilevers) f_max = std::max(f_max, units::to_hz(c.omega));
  if (integrator.sample_rate < 2.5 * f_max)
    throw ConfigError("must exceed 2.5x the highest natural frequency",
                      "integrator.sample_rate_hz");

  if (force_curve) {
    for (double v : force_curve->values)
      if (!(v > 0.0)) throw ConfigError("separations must be > 0", "force_curve");
    if (force_curve->mode == ForceCurveMode::MoveCenter) {
      if (!(force_curve->total > 0.0)) throw ConfigError("must be > 0", "force_curve.total_nm");
      for (double v : force_curve->values)
        if (!(v < force_curve->total))
          throw ConfigError("separations must be below total_nm", "force_curve");
    } else if (!(force_curve->fixed > 0.0)) {
      throw ConfigError("must be > 0", "force_curve.fixed_nm");
    }
  }
  if (eigen_sweep) {
    if (eigen_sweep->delta3.empty())
      throw ConfigError("needs at least one detuning", "eigen_sweep");
    if (eigen_sweep->g12 && !std::isfinite(*eigen_sweep->g12))
      throw ConfigError("must be finite", "eigen_sweep.g12_hz");
    if (eigen_sweep->g23 && !std::isfinite(*eigen_sweep->g23))
      throw ConfigError("must be finite", "eigen_sweep.g23_hz");
  }
  if (spectrogram) {
    check_sweep(spectrogram->sweep, "spectrogram");
    if (!(spectrogram->segment > 0.0)) throw ConfigError("must be > 0", "spectrogram.segment_s");
    if (!(spectrogram->duration >= 2.0 * spectrogram->segment))
      throw ConfigError("must cover at least two segments", "spectrogram.duration_s");
    if (!(spectrogram->band_low >= 0.0 && spectrogram->band_high > spectrogram->band_low))
      throw ConfigError("needs 0 <= band_low < band_high", "spectrogram.band_low_hz");
  }
  if (transduction) check_sweep(*transduction, "transduction");
  if (calibration && (calibration->cantilever < 1 || calibration->cantilever > 3))
    throw ConfigError("must be 1, 2 or 3", "calibration.cantilever");
}

std::array<CantileverParams, 3> default_cantilevers() {
  return {CantileverParams::from_stiffness(kOuterStiffness, units::hz(5661.0), units::hz(3.22)),
          CantileverParams::from_stiffness(kCenterStiffness, units::hz(6172.0), units::hz(6.06)),
          CantileverParams::from_stiffness(kOuterStiffness, units::hz(4892.0), units::hz(3.58))};
}

SystemConfig default_config() {
  SystemConfig c;
  c.cantilevers = default_cantilevers();
  c.geometry = {100e-9, 105e-9, 35e-6, 35e-6};
  c.modulation.delta_d1 = 6.0e-9;
  c.modulation.delta_d2 = 8.5e-9;
  c.resonant = {true, true, true};
  c.drive = {1, 1e-13, 0.0, 0.0};
  return c;
}

}  // namespace casimir3
