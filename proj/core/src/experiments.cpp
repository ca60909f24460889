#include "casimir3/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"
#include "casimir3/spectrogram.hpp"
#include "sweep_rows.hpp"

namespace casimir3 {

namespace {

bool same_material(const MaterialModel& a, const MaterialModel& b) {
  if (a.kind().index() != b.kind().index()) return false;
  if (const auto* ta = std::get_if<TabulatedPermittivity>(&a.kind()))
    return ta->points() == std::get<TabulatedPermittivity>(b.kind()).points();
  if (const auto* da = std::get_if<Drude>(&a.kind())) {
    const auto& db = std::get<Drude>(b.kind());
    return da->plasma_frequency == db.plasma_frequency && da->relaxation_rate == db.relaxation_rate;
  }
  if (const auto* pa = std::get_if<Plasma>(&a.kind()))
    return pa->plasma_frequency == std::get<Plasma>(b.kind()).plasma_frequency;
  return true;
}

bool same_tables(const SystemConfig& a, const SystemConfig& b) {
  return same_material(a.material, b.material) && a.temperature == b.temperature &&
         a.geometry.R1 == b.geometry.R1 && a.geometry.R2 == b.geometry.R2 &&
         a.table.min_separation == b.table.min_separation &&
         a.table.max_separation == b.table.max_separation && a.table.points == b.table.points;
}

// Offsets of each cantilever's line from cantilever 1's in the drive chain.
std::array<double, 3> chain_offsets(const ModulationSettings& m) {
  return {0.0, m.omega_mod1, m.omega_mod1 - m.omega_mod2};
}

}  // namespace

PreparedSystem PreparedSystem::prepare(const SystemConfig& config, int threads) {
  config.validate();
  PreparedSystem p;
  const auto& g = config.geometry;
  p.table1_ = std::make_shared<const CasimirTable>(
      CasimirTable::build(config.material, g.R1, config.temperature, config.table, threads));
  p.table2_ = g.R2 == g.R1 ? p.table1_
                           : std::make_shared<const CasimirTable>(CasimirTable::build(
                                 config.material, g.R2, config.temperature, config.table, threads));
  p.resolve(config);
  return p;
}

PreparedSystem PreparedSystem::with(const SystemConfig& config) const {
  config.validate();
  if (!same_tables(config, config_))
    throw ConfigError("material, temperature, radii or table grid changed; prepare again");
  PreparedSystem p = *this;
  p.resolve(config);
  return p;
}

void PreparedSystem::resolve(const SystemConfig& config) {
  source_ = config;
  config_ = config;
  const Cantilevers bare = config.cantilevers_with_spheres();
  cantilevers_ = bare;
  cantilevers_[1] = apply_gain(bare[1], config.gain);

  auto& mods = config_.modulation;
  auto assign = [&](const std::array<double, 3>& omega) {
    if (config.resonant.omega_mod1) mods.omega_mod1 = omega[1] - omega[0];
    if (config.resonant.omega_mod2) mods.omega_mod2 = omega[0] + mods.omega_mod1 - omega[2];
    if (config.resonant.drive)
      config_.drive.frequency = omega[static_cast<std::size_t>(config.drive.target - 1)];
  };
  if (config.use_effective_frequencies) {
    const auto f1 = table1_->evaluate(config.geometry.d1);
    const auto f2 = table2_->evaluate(config.geometry.d2);
    std::array<double, 3> omega = dressed_modes(bare, f1.gradient, f2.gradient).omega;
    // The modulated stiffness depends weakly on the modulation frequencies;
    // a few fixed-point passes make the resonance conditions exact.
    for (int pass = 0; pass < 20; ++pass) {
      assign(omega);
      if (mods.omega_mod1 < 0.0 || mods.omega_mod2 < 0.0) break;
      const auto next =
          modulated_mode_frequencies(cantilevers_, config.geometry, mods, *table1_, *table2_,
                                     config.modulation_corrections);
      double change = 0.0;
      for (std::size_t i = 0; i < 3; ++i) change = std::max(change, std::abs(next[i] - omega[i]));
      omega = next;
      if (change <= 1e-13 * omega[1]) break;
    }
    assign(omega);
  } else {
    std::array<double, 3> omega{};
    for (std::size_t i = 0; i < 3; ++i) omega[i] = bare[i].omega;
    assign(omega);
  }
  config_.resonant = {};
  if (mods.omega_mod1 < 0.0 || mods.omega_mod2 < 0.0)
    throw ConfigError("resolved modulation frequency is negative", "modulation");

  model_ = build_reduced_model(cantilevers_, config_.geometry, mods, *table1_, *table2_,
                               config_.use_effective_frequencies, config_.modulation_corrections);
}

SimulationSetup PreparedSystem::simulation_setup() const {
  SimulationSetup s;
  s.cantilevers = cantilevers_;
  for (std::size_t i = 0; i < 3; ++i) s.noise_gamma[i] = config_.cantilevers[i].gamma;
  s.geometry = config_.geometry;
  s.modulation = config_.modulation;
  s.drive = config_.drive;
  s.noise = config_.noise;
  s.table1 = table1_.get();
  s.table2 = table2_.get();
  s.about_equilibrium = true;
  return s;
}

std::array<double, 3> PreparedSystem::equilibrium_offsets() const {
  const double f1 = table1_->force(config_.geometry.d1);
  const double f2 = table2_->force(config_.geometry.d2);
  return {-f1 / cantilevers_[0].k_spring, (f1 - f2) / cantilevers_[1].k_spring,
          f2 / cantilevers_[2].k_spring};
}

double transient_time(const PreparedSystem& system) {
  double t = 0.0;
  for (const auto& c : system.cantilevers())
    if (c.gamma != 0.0) t = std::max(t, 20.0 / std::abs(c.gamma));
  const auto& m = system.model();
  const double g = std::max(std::abs(m.g12), std::abs(m.g23));
  if (g > 0.0) t = std::max(t, 10.0 / g);
  const double margin = system.stability().margin;
  if (margin > 0.0) t = std::max(t, 12.0 / margin);
  return std::min(t, system.config().integrator.max_transient);
}

double demodulate(std::span<const double> trace, double sample_rate, double start_time,
                  double w) {
  const std::size_t n = trace.size();
  if (n < 2) return 0.0;
  std::complex<double> acc = 0.0;
  double weight = 0.0;
  const double dt = 1.0 / sample_rate;
  for (std::size_t k = 0; k < n; ++k) {
    const double hann = 0.5 - 0.5 * std::cos(units::kTwoPi * (static_cast<double>(k) + 0.5) /
                                             static_cast<double>(n));
    const double phase = w * (start_time + static_cast<double>(k) * dt);
    acc += hann * trace[k] * std::complex<double>(std::cos(phase), -std::sin(phase));
    weight += hann;
  }
  return 2.0 * std::abs(acc) / weight;
}

namespace {

AmplitudeResult run_amplitude_experiment(const PreparedSystem& system,
                                         const ExperimentOptions& options) {
  const auto& cfg = system.config();
  AmplitudeResult result;
  result.stability = system.stability();
  if (options.require_stable && !(result.stability.margin > 0.0)) {
    std::ostringstream os;
    os << "reduced model is " << to_string(result.stability.status) << " (margin "
       << result.stability.margin << " rad/s); steady state does not exist";
    throw InstabilityError(os.str(), 0.0);
  }

  const Simulator sim(system.simulation_setup());
  const double fs = cfg.integrator.sample_rate;
  const int steps = cfg.integrator.steps_per_sample > 0 ? cfg.integrator.steps_per_sample
                                                        : sim.steps_per_sample(fs);
  double total = 0.0, window = 0.0;
  if (cfg.integrator.duration > 0.0) {
    total = cfg.integrator.duration;
    window = 0.25 * total;
  } else {
    const double settle = transient_time(system);
    window = std::max(settle / 3.0, 2.0);
    total = settle + window;
  }
  result.transient = total - window;
  result.window = window;

  SimulationState state;
  state.rng.seed(cfg.seed);
  Recording rec = sim.run(state, fs, steps, total, total - window);

  const auto offsets = chain_offsets(cfg.modulation);
  const auto target = static_cast<std::size_t>(cfg.drive.target - 1);
  for (std::size_t i = 0; i < 3; ++i) {
    result.lines[i] = cfg.drive.frequency + offsets[i] - offsets[target];
    result.amplitudes[i] = demodulate(rec.x[i], fs, rec.start_time, std::abs(result.lines[i]));
  }
  result.ratio = result.amplitudes[0] > 0.0 ? result.amplitudes[2] / result.amplitudes[0] : 0.0;

  // Steady-state certification on the two halves of the window.
  const double a_max = *std::max_element(result.amplitudes.begin(), result.amplitudes.end());
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(result.amplitudes[i] >= 1e-3 * a_max) || a_max == 0.0) continue;
    const std::size_t half = rec.x[i].size() / 2;
    const std::span<const double> all(rec.x[i]);
    const double first = demodulate(all.first(half), fs, rec.start_time, std::abs(result.lines[i]));
    const double second = demodulate(all.subspan(half), fs,
                                     rec.start_time + static_cast<double>(half) / fs,
                                     std::abs(result.lines[i]));
    const double drift = std::abs(second - first) / result.amplitudes[i];
    result.drift = std::max(result.drift, drift);
    if (drift > 0.02) {
      std::ostringstream os;
      os << "amplitude of cantilever " << i + 1 << " drifts by " << drift * 100.0
         << "% across the trailing window; run longer (integrator.duration_s > " << total
         << ")";
      throw SteadyStateError(os.str());
    }
  }

  if (options.keep_traces) {
    result.traces.sample_rate = fs;
    result.traces.start_time = rec.start_time;
    result.traces.traces = std::move(rec.x);
    result.traces.metadata = cfg;
    result.traces.seed = cfg.seed;
  }
  return result;
}

}  // namespace

AmplitudeResult run_switch_experiment(const PreparedSystem& system,
                                      const ExperimentOptions& options) {
  return run_amplitude_experiment(system, options);
}

AmplitudeResult run_gain_experiment(const PreparedSystem& system,
                                    const ExperimentOptions& options) {
  if (!(system.config().gain >= 0.0)) throw DomainError("gain G must be >= 0");
  return run_amplitude_experiment(system, options);
}

TraceSet run_thermal_psd(const PreparedSystem& system, double duration) {
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  const auto& cfg = system.config();
  const Simulator sim(system.simulation_setup());
  const double fs = cfg.integrator.sample_rate;
  const int steps = cfg.integrator.steps_per_sample > 0 ? cfg.integrator.steps_per_sample
                                                        : sim.steps_per_sample(fs);
  const double settle = transient_time(system);
  SimulationState state;
  state.rng.seed(cfg.seed);
  Recording rec = sim.run(state, fs, steps, settle + duration, settle);
  TraceSet out;
  out.sample_rate = fs;
  out.start_time = rec.start_time;
  out.traces = std::move(rec.x);
  out.metadata = cfg;
  out.seed = cfg.seed;
  return out;
}

// Displacement beyond which a growth measurement stops (m).
constexpr double kLinearReach = 1e-9;

GrowthMeasurement measure_growth_rate(const PreparedSystem& system, double duration,
                                      double kick) {
  const auto& cfg = system.config();
  SimulationSetup setup = system.simulation_setup();
  setup.drive.amplitude = 0.0;
  setup.noise.enabled = false;
  const Simulator sim(setup);
  const double fs = cfg.integrator.sample_rate;
  const int steps = sim.steps_per_sample(fs);
  const double dt = 1.0 / (fs * steps);
  const auto& cants = system.cantilevers();

  // The modulation forces the cantilevers directly; the kicked run minus an
  // unkicked reference leaves only the free (homogeneous) motion.
  SimulationState kicked, reference;
  kicked.x[0] = kick;
  auto energy = [&] {
    double e = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& c = cants[i];
      const double x = kicked.x[i] - reference.x[i];
      const double v = kicked.v[i] - reference.v[i];
      e += (c.mass * v * v + c.k_spring * x * x) / (2.0 * c.omega);
    }
    return e;
  };
  const double e0 = energy();
  std::vector<double> times, logs;
  const auto samples = static_cast<long>(std::llround(duration * fs));
  for (long n = 0; n < samples; ++n) {
    for (int k = 0; k < steps; ++k) {
      sim.advance(kicked, dt);
      sim.advance(reference, dt);
    }
    const double e = energy();
    times.push_back(kicked.t);
    logs.push_back(std::log(e));
    // Both runs grow when the system is unstable; stop while still linear.
    double reach = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      reach = std::max({reach, std::abs(kicked.x[i]), std::abs(reference.x[i])});
    if (e > 1e8 * e0 || reach > kLinearReach) break;
  }
  const std::size_t begin = times.size() / 2;
  const auto n = static_cast<double>(times.size() - begin);
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t k = begin; k < times.size(); ++k) {
    st += times[k];
    sl += logs[k];
    stt += times[k] * times[k];
    stl += times[k] * logs[k];
  }
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  return {0.5 * slope, -system.stability().margin};
}

std::vector<double> sweep_values(const SweepSpec& sweep, const SystemConfig& resolved) {
  if (!sweep.relative) return sweep.values;
  double base = 0.0;
  switch (sweep.parameter) {
    case SweepParameter::OmegaMod1: base = resolved.modulation.omega_mod1; break;
    case SweepParameter::OmegaMod2: base = resolved.modulation.omega_mod2; break;
    case SweepParameter::Gain: base = resolved.gain; break;
    case SweepParameter::DeltaD1: base = resolved.modulation.delta_d1; break;
    case SweepParameter::DeltaD2: base = resolved.modulation.delta_d2; break;
    case SweepParameter::DriveAmplitude: base = resolved.drive.amplitude; break;
  }
  std::vector<double> out(sweep.values);
  for (double& v : out) v += base;
  return out;
}

std::vector<TransductionRow> sweep_transduction(const PreparedSystem& system,
                                                const SweepSpec& sweep, int threads) {
  const std::vector<double> values = sweep_values(sweep, system.config());
  std::vector<TransductionRow> rows(values.size());
  detail::run_rows(values, threads, [&](std::size_t i) {
    SystemConfig cfg = with_parameter(system.source_config(), sweep.parameter, values[i],
                                      sweep.delta_d2_ratio);
    cfg.seed = derive_seed(system.config().seed, i);
    const PreparedSystem row_system = system.with(cfg);
    auto& row = rows[i];
    row.value = values[i];
    row.stability = row_system.stability();
    const auto& m = row_system.model();
    const double tol = 1e-6 * m.omega[1];
    if (std::abs(m.delta2) <= tol && std::abs(m.delta3) <= tol)
      row.closed_form = transduction_ratio(m);
    if (row.stability.status != Stability::Stable) return;
    ExperimentOptions options;
    options.keep_traces = false;
    try {
      row.result = cfg.gain > 0.0 ? run_gain_experiment(row_system, options)
                                  : run_switch_experiment(row_system, options);
    } catch (const ContactError& e) {
      row.divergence = e.what();
    } catch (const InstabilityError& e) {
      row.divergence = e.what();
    }
  });
  return rows;
}

SystemConfig with_parameter(const SystemConfig& config, SweepParameter parameter, double value,
                            std::optional<double> delta_d2_ratio) {
  SystemConfig c = config;
  switch (parameter) {
    case SweepParameter::OmegaMod1:
      c.modulation.omega_mod1 = value;
      c.resonant.omega_mod1 = false;
      break;
    case SweepParameter::OmegaMod2:
      c.modulation.omega_mod2 = value;
      c.resonant.omega_mod2 = false;
      break;
    case SweepParameter::Gain:
      c.gain = value;
      break;
    case SweepParameter::DeltaD1:
      c.modulation.delta_d1 = value;
      if (delta_d2_ratio) c.modulation.delta_d2 = *delta_d2_ratio * value;
      break;
    case SweepParameter::DeltaD2:
      c.modulation.delta_d2 = value;
      break;
    case SweepParameter::DriveAmplitude:
      c.drive.amplitude = value;
      break;
  }
  return c;
}

}  // namespace casimir3
