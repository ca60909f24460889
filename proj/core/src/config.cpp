#include "casimir3/config.hpp"

#include <fstream>
#include <set>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

using nlohmann::json;

namespace {

// Object view that records which keys were read so leftovers can be
// reported as unknown.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("expected an object", path_);
  }

  ~Node() = default;

  bool has(const std::string& key) const { return j_.contains(key); }
  const std::string& where() const { return path_; }
  std::string path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError("expected a number", path(key));
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError("expected true or false", path(key));
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback = {}) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError("expected a string", path(key));
    return v.get<std::string>();
  }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError("expected an integer", path(key));
    return v.get<long>();
  }
  Node child(const std::string& key) { return Node(raw(key), path(key)); }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown key", path(key));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// A frequency in Hz or the string "resonant".
double frequency_or_resonant(Node& n, const std::string& key, bool& resonant, double fallback) {
  if (!n.has(key)) return fallback;
  const json& v = n.raw(key);
  if (v.is_string()) {
    if (v.get<std::string>() != "resonant")
      throw ConfigError("expected a number or \"resonant\"", n.path(key));
    resonant = true;
    return 0.0;
  }
  if (!v.is_number()) throw ConfigError("expected a number or \"resonant\"", n.path(key));
  resonant = false;
  return units::hz(v.get<double>());
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("expected an array of numbers", path);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ConfigError("expected a number", path + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> linspace(Node& n, const std::string& key) {
  Node s = n.child(key);
  const double start = s.number("start");
  const double stop = s.number("stop");
  const long points = s.integer("points", 0);
  s.finish();
  if (points < 0) throw ConfigError("points must be >= 0", n.path(key) + ".points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (long i = 0; i < points; ++i)
    out[static_cast<std::size_t>(i)] =
        points == 1 ? start : start + (stop - start) * static_cast<double>(i) /
                                          static_cast<double>(points - 1);
  return out;
}

// Reads one of values_<unit> / sweep_<unit> / detuning_<unit>, scaled to SI.
std::vector<double> read_values(Node& n, const std::string& unit, double scale, bool& relative) {
  const int present = n.has("values_" + unit) + n.has("sweep_" + unit) +
                      n.has("detuning_" + unit);
  if (present != 1)
    throw ConfigError("give exactly one of values_" + unit + ", sweep_" + unit + ", detuning_" +
                          unit,
                      n.where());
  std::vector<double> v;
  relative = false;
  if (n.has("values_" + unit)) {
    v = number_list(n.raw("values_" + unit), n.path("values_" + unit));
  } else if (n.has("sweep_" + unit)) {
    v = linspace(n, "sweep_" + unit);
  } else {
    v = linspace(n, "detuning_" + unit);
    relative = true;
  }
  for (double& x : v) x *= scale;
  return v;
}

struct ParamUnit {
  const char* unit;
  double scale;
};

ParamUnit unit_of(SweepParameter p) {
  switch (p) {
    case SweepParameter::OmegaMod1:
    case SweepParameter::OmegaMod2:
    case SweepParameter::Gain: return {"hz", units::kTwoPi};
    case SweepParameter::DeltaD1:
    case SweepParameter::DeltaD2: return {"nm", 1e-9};
    case SweepParameter::DriveAmplitude: return {"n", 1.0};
  }
  return {"", 1.0};
}

SweepSpec read_sweep(Node& n) {
  SweepSpec s;
  s.parameter = parse_sweep_parameter(n.string("parameter", "omega_mod2"));
  const auto u = unit_of(s.parameter);
  s.values = read_values(n, u.unit, u.scale, s.relative);
  if (n.has("delta_d2_ratio")) {
    if (s.parameter != SweepParameter::DeltaD1)
      throw ConfigError("only meaningful for delta_d1 sweeps", n.path("delta_d2_ratio"));
    s.delta_d2_ratio = n.number("delta_d2_ratio");
  }
  return s;
}

MaterialModel read_material(Node& n, const std::filesystem::path& base_dir) {
  const std::string model = n.string("model", "drude");
  if (model == "ideal") return MaterialModel::ideal();
  if (model == "drude")
    return MaterialModel::drude(units::ev_to_rad_per_s(n.number("plasma_frequency_ev", 9.0)),
                                units::ev_to_rad_per_s(n.number("relaxation_rate_ev", 0.035)));
  if (model == "plasma")
    return MaterialModel::plasma(units::ev_to_rad_per_s(n.number("plasma_frequency_ev", 9.0)));
  if (model == "tabulated") {
    if (n.has("file") == n.has("points"))
      throw ConfigError("tabulated material needs exactly one of file, points", n.path("model"));
    if (n.has("file")) {
      std::filesystem::path file = n.string("file");
      if (file.is_relative()) file = base_dir / file;
      return MaterialModel::tabulated(TabulatedPermittivity::load(file));
    }
    const json& pts = n.raw("points");
    std::vector<std::pair<double, double>> points;
    if (!pts.is_array()) throw ConfigError("expected [[xi_rad_s, eps], ...]", n.path("points"));
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ConfigError("expected [[xi_rad_s, eps], ...]", n.path("points"));
      points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return MaterialModel::tabulated(TabulatedPermittivity(std::move(points)));
  }
  throw ConfigError("unknown material model '" + model + "'", n.path("model"));
}

CantileverParams read_cantilever(Node& n, const CantileverParams& fallback) {
  const double omega = units::hz(n.number("frequency_hz", units::to_hz(fallback.omega)));
  const double gamma = units::hz(n.number("damping_hz", units::to_hz(fallback.gamma)));
  const bool has_k = n.has("stiffness_n_per_m"), has_m = n.has("mass_kg");
  CantileverParams c;
  if (has_k && has_m) {
    c = {n.number("mass_kg"), omega, gamma, n.number("stiffness_n_per_m"), std::nullopt};
  } else if (has_m) {
    c = {n.number("mass_kg"), omega, gamma, 0.0, std::nullopt};
    c.k_spring = c.mass * omega * omega;
  } else {
    const double k = has_k ? n.number("stiffness_n_per_m") : fallback.k_spring;
    c = {k / (omega * omega), omega, gamma, k, std::nullopt};
  }
  c.validate(n.where().c_str());
  return c;
}

json hz(double omega) { return units::to_hz(omega); }

}  // namespace

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::OmegaMod1: return "omega_mod1";
    case SweepParameter::OmegaMod2: return "omega_mod2";
    case SweepParameter::Gain: return "gain";
    case SweepParameter::DeltaD1: return "delta_d1";
    case SweepParameter::DeltaD2: return "delta_d2";
    case SweepParameter::DriveAmplitude: return "drive_amplitude";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  for (auto p : {SweepParameter::OmegaMod1, SweepParameter::OmegaMod2, SweepParameter::Gain,
                 SweepParameter::DeltaD1, SweepParameter::DeltaD2,
                 SweepParameter::DriveAmplitude})
    if (name == to_string(p)) return p;
  throw ConfigError("unknown sweep parameter '" + name + "'", "parameter");
}

SystemConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  SystemConfig cfg = default_config();
  Node root(j, "");
  cfg.figure = root.string("figure");

  if (root.has("cantilevers")) {
    const json& arr = root.raw("cantilevers");
    if (!arr.is_array() || arr.size() != 3)
      throw ConfigError("expected an array of three cantilevers", "cantilevers");
    for (std::size_t i = 0; i < 3; ++i) {
      Node c(arr[i], "cantilevers[" + std::to_string(i) + "]");
      cfg.cantilevers[i] = read_cantilever(c, cfg.cantilevers[i]);
      c.finish();
    }
  }
  if (root.has("geometry")) {
    Node g = root.child("geometry");
    cfg.geometry.d1 = g.number("d1_nm", cfg.geometry.d1 * 1e9) * 1e-9;
    cfg.geometry.d2 = g.number("d2_nm", cfg.geometry.d2 * 1e9) * 1e-9;
    cfg.geometry.R1 = g.number("r1_um", cfg.geometry.R1 * 1e6) * 1e-6;
    cfg.geometry.R2 = g.number("r2_um", cfg.geometry.R2 * 1e6) * 1e-6;
    g.finish();
  }
  if (root.has("material")) {
    Node m = root.child("material");
    cfg.material = read_material(m, base_dir);
    m.finish();
  }
  cfg.temperature = root.number("temperature_k", cfg.temperature);
  if (root.has("table")) {
    Node t = root.child("table");
    cfg.table.min_separation = t.number("min_separation_nm", cfg.table.min_separation * 1e9) * 1e-9;
    cfg.table.max_separation = t.number("max_separation_nm", cfg.table.max_separation * 1e9) * 1e-9;
    cfg.table.points = static_cast<int>(t.integer("points", cfg.table.points));
    t.finish();
  }
  if (root.has("modulation")) {
    Node m = root.child("modulation");
    auto& mod = cfg.modulation;
    mod.omega_mod1 = frequency_or_resonant(m, "omega_mod1_hz", cfg.resonant.omega_mod1, mod.omega_mod1);
    mod.omega_mod2 = frequency_or_resonant(m, "omega_mod2_hz", cfg.resonant.omega_mod2, mod.omega_mod2);
    mod.delta_d1 = m.number("delta_d1_nm", mod.delta_d1 * 1e9) * 1e-9;
    mod.delta_d2 = m.number("delta_d2_nm", mod.delta_d2 * 1e9) * 1e-9;
    m.finish();
  }
  if (root.has("drive")) {
    Node d = root.child("drive");
    cfg.drive.target = static_cast<int>(d.integer("target", cfg.drive.target));
    cfg.drive.amplitude = d.number("amplitude_n", cfg.drive.amplitude);
    cfg.drive.frequency = frequency_or_resonant(d, "frequency_hz", cfg.resonant.drive, cfg.drive.frequency);
    cfg.drive.phase = d.number("phase_rad", cfg.drive.phase);
    d.finish();
  }
  cfg.gain = units::hz(root.number("gain_hz", units::to_hz(cfg.gain)));
  if (root.has("noise")) {
    Node n = root.child("noise");
    cfg.noise.enabled = n.boolean("enabled", cfg.noise.enabled);
    cfg.noise.temperature = n.number("temperature_k", cfg.noise.temperature);
    n.finish();
  }
  if (root.has("integrator")) {
    Node n = root.child("integrator");
    auto& in = cfg.integrator;
    in.sample_rate = n.number("sample_rate_hz", in.sample_rate);
    in.duration = n.number("duration_s", in.duration);
    in.steps_per_sample = static_cast<int>(n.integer("steps_per_sample", in.steps_per_sample));
    in.max_transient = n.number("max_transient_s", in.max_transient);
    n.finish();
  }
  cfg.use_effective_frequencies = root.boolean("effective_frequencies", cfg.use_effective_frequencies);
  cfg.modulation_corrections = root.boolean("modulation_corrections", cfg.modulation_corrections);
  if (root.has("seed")) {
    const json& s = root.raw("seed");
    if (!s.is_number_unsigned()) throw ConfigError("expected a non-negative integer", "seed");
    cfg.seed = s.get<std::uint64_t>();
  }

  if (root.has("force_curve")) {
    Node n = root.child("force_curve");
    ForceCurveSpec fc;
    const std::string mode = n.string("mode", "move-center");
    if (mode == "move-center") fc.mode = ForceCurveMode::MoveCenter;
    else if (mode == "move-1") fc.mode = ForceCurveMode::MoveFirst;
    else if (mode == "move-3") fc.mode = ForceCurveMode::MoveThird;
    else throw ConfigError("expected move-center, move-1 or move-3", n.path("mode"));
    fc.total = n.number("total_nm", fc.total * 1e9) * 1e-9;
    fc.fixed = n.number("fixed_nm", fc.fixed * 1e9) * 1e-9;
    bool relative = false;
    fc.values = read_values(n, "nm", 1e-9, relative);
    if (relative) throw ConfigError("detuning_nm is not supported here", n.path("detuning_nm"));
    n.finish();
    cfg.force_curve = fc;
  }
  if (root.has("eigen_sweep")) {
    Node n = root.child("eigen_sweep");
    EigenSweepSpec es;
    if (n.has("delta3_hz") == n.has("delta3_values_hz"))
      throw ConfigError("give exactly one of delta3_hz, delta3_values_hz", n.where());
    if (n.has("delta3_hz"))
      es.delta3 = linspace(n, "delta3_hz");
    else
      es.delta3 = number_list(n.raw("delta3_values_hz"), n.path("delta3_values_hz"));
    for (double& v : es.delta3) v = units::hz(v);
    es.delta2 = units::hz(n.number("delta2_hz", 0.0));
    if (n.has("g12_hz")) es.g12 = units::hz(n.number("g12_hz"));
    if (n.has("g23_hz")) es.g23 = units::hz(n.number("g23_hz"));
    es.include_damping = n.boolean("include_damping", true);
    n.finish();
    cfg.eigen_sweep = es;
  }
  if (root.has("spectrogram")) {
    Node n = root.child("spectrogram");
    SpectrogramSpec sp;
    sp.sweep = read_sweep(n);
    sp.duration = n.number("duration_s", sp.duration);
    sp.segment = n.number("segment_s", sp.segment);
    sp.band_low = n.number("band_low_hz", sp.band_low);
    sp.band_high = n.number("band_high_hz", sp.band_high);
    n.finish();
    cfg.spectrogram = sp;
  }
  if (root.has("transduction")) {
    Node n = root.child("transduction");
    cfg.transduction = read_sweep(n);
    n.finish();
  }
  if (root.has("calibration")) {
    Node n = root.child("calibration");
    CalibrationSpec cs;
    cs.cantilever = static_cast<int>(n.integer("cantilever", cs.cantilever));
    cs.records_file = n.string("records_file");
    if (!cs.records_file.empty() && std::filesystem::path(cs.records_file).is_relative())
      cs.records_file = (base_dir / cs.records_file).string();
    n.finish();
    cfg.calibration = cs;
  }
  root.finish();
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what(), path.string());
  }
  return config_from_json(j, path.parent_path());
}

json config_to_json(const SystemConfig& cfg) {
  json j;
  if (!cfg.figure.empty()) j["figure"] = cfg.figure;
  j["cantilevers"] = json::array();
  for (const auto& c : cfg.cantilevers)
    j["cantilevers"].push_back({{"frequency_hz", hz(c.omega)},
                                {"damping_hz", hz(c.gamma)},
                                {"stiffness_n_per_m", c.k_spring},
                                {"mass_kg", c.mass}});
  j["geometry"] = {{"d1_nm", cfg.geometry.d1 * 1e9},
                   {"d2_nm", cfg.geometry.d2 * 1e9},
                   {"r1_um", cfg.geometry.R1 * 1e6},
                   {"r2_um", cfg.geometry.R2 * 1e6}};
  json m;
  std::visit(
      [&m](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        const double ev = units::ev_to_rad_per_s(1.0);
        if constexpr (std::is_same_v<T, IdealConductor>) {
          m["model"] = "ideal";
        } else if constexpr (std::is_same_v<T, Drude>) {
          m["model"] = "drude";
          m["plasma_frequency_ev"] = k.plasma_frequency / ev;
          m["relaxation_rate_ev"] = k.relaxation_rate / ev;
        } else if constexpr (std::is_same_v<T, Plasma>) {
          m["model"] = "plasma";
          m["plasma_frequency_ev"] = k.plasma_frequency / ev;
        } else {
          m["model"] = "tabulated";
          m["points"] = json::array();
          for (const auto& [xi, eps] : k.points()) m["points"].push_back({xi, eps});
        }
      },
      cfg.material.kind());
  j["material"] = m;
  j["temperature_k"] = cfg.temperature;
  j["table"] = {{"min_separation_nm", cfg.table.min_separation * 1e9},
                {"max_separation_nm", cfg.table.max_separation * 1e9},
                {"points", cfg.table.points}};
  auto freq = [](bool resonant, double omega) -> json {
    return resonant ? json("resonant") : json(units::to_hz(omega));
  };
  j["modulation"] = {{"omega_mod1_hz", freq(cfg.resonant.omega_mod1, cfg.modulation.omega_mod1)},
                     {"omega_mod2_hz", freq(cfg.resonant.omega_mod2, cfg.modulation.omega_mod2)},
                     {"delta_d1_nm", cfg.modulation.delta_d1 * 1e9},
                     {"delta_d2_nm", cfg.modulation.delta_d2 * 1e9}};
  j["drive"] = {{"target", cfg.drive.target},
                {"amplitude_n", cfg.drive.amplitude},
                {"frequency_hz", freq(cfg.resonant.drive, cfg.drive.frequency)},
                {"phase_rad", cfg.drive.phase}};
  j["gain_hz"] = hz(cfg.gain);
  j["noise"] = {{"enabled", cfg.noise.enabled}, {"temperature_k", cfg.noise.temperature}};
  j["integrator"] = {{"sample_rate_hz", cfg.integrator.sample_rate},
                     {"duration_s", cfg.integrator.duration},
                     {"steps_per_sample", cfg.integrator.steps_per_sample},
                     {"max_transient_s", cfg.integrator.max_transient}};
  j["effective_frequencies"] = cfg.use_effective_frequencies;
  j["modulation_corrections"] = cfg.modulation_corrections;
  j["seed"] = cfg.seed;

  auto sweep_json = [](const SweepSpec& s) {
    json o;
    o["parameter"] = to_string(s.parameter);
    const auto u = unit_of(s.parameter);
    std::vector<double> v = s.values;
    for (double& x : v) x /= u.scale;
    if (s.relative)
      o[std::string("detuning_") + u.unit] = {{"start", v.empty() ? 0.0 : v.front()},
                                              {"stop", v.empty() ? 0.0 : v.back()},
                                              {"points", v.size()}};
    else
      o[std::string("values_") + u.unit] = v;
    if (s.delta_d2_ratio) o["delta_d2_ratio"] = *s.delta_d2_ratio;
    return o;
  };
  if (cfg.force_curve) {
    const auto& fc = *cfg.force_curve;
    const char* mode = fc.mode == ForceCurveMode::MoveCenter ? "move-center"
                       : fc.mode == ForceCurveMode::MoveFirst ? "move-1"
                                                               : "move-3";
    std::vector<double> v = fc.values;
    for (double& x : v) x *= 1e9;
    j["force_curve"] = {{"mode", mode},
                        {"total_nm", fc.total * 1e9},
                        {"fixed_nm", fc.fixed * 1e9},
                        {"values_nm", v}};
  }
  if (cfg.eigen_sweep) {
    const auto& es = *cfg.eigen_sweep;
    std::vector<double> v = es.delta3;
    for (double& x : v) x = units::to_hz(x);
    json o = {{"delta3_values_hz", v},
              {"delta2_hz", units::to_hz(es.delta2)},
              {"include_damping", es.include_damping}};
    if (es.g12) o["g12_hz"] = units::to_hz(*es.g12);
    if (es.g23) o["g23_hz"] = units::to_hz(*es.g23);
    j["eigen_sweep"] = o;
  }
  if (cfg.spectrogram) {
    json o = sweep_json(cfg.spectrogram->sweep);
    o["duration_s"] = cfg.spectrogram->duration;
    o["segment_s"] = cfg.spectrogram->segment;
    o["band_low_hz"] = cfg.spectrogram->band_low;
    o["band_high_hz"] = cfg.spectrogram->band_high;
    j["spectrogram"] = o;
  }
  if (cfg.transduction) j["transduction"] = sweep_json(*cfg.transduction);
  if (cfg.calibration)
    j["calibration"] = {{"cantilever", cfg.calibration->cantilever},
                        {"records_file", cfg.calibration->records_file}};
  return j;
}

}  // namespace casimir3
