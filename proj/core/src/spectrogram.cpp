#include "casimir3/spectrogram.hpp"

#include <cmath>

#include "casimir3/errors.hpp"
#include "sweep_rows.hpp"

namespace casimir3 {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Spectrogram sweep_spectrogram(const PreparedSystem& system, const SweepSpec& sweep,
                              const SpectrogramOptions& options) {
  if (!system.config().noise.enabled)
    throw ConfigError("thermal spectrogram needs noise enabled", "noise.enabled");
  const double fs = system.config().integrator.sample_rate;
  const auto segment = static_cast<std::size_t>(std::llround(options.segment * fs));

  const std::vector<double> values = sweep_values(sweep, system.config());
  Spectrogram out;
  out.parameter = sweep.parameter;
  out.rows.resize(values.size());
  detail::run_rows(values, options.threads, [&](std::size_t i) {
    SystemConfig cfg = with_parameter(system.source_config(), sweep.parameter, values[i],
                                      sweep.delta_d2_ratio);
    cfg.seed = derive_seed(system.config().seed, i);
    const PreparedSystem row_system = system.with(cfg);
    const TraceSet traces = run_thermal_psd(row_system, options.duration);
    auto& row = out.rows[i];
    row.sweep_value = values[i];
    row.seed = cfg.seed;
    for (std::size_t c = 0; c < 3; ++c)
      row.psd[c] = welch_psd(traces.traces[c], fs, segment, 0.5);
  });
  return out;
}

}  // namespace casimir3
