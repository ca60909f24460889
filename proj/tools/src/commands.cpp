#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "casimir3/calibration.hpp"
#include "casimir3/config.hpp"
#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"
#include "casimir3/experiments.hpp"
#include "casimir3/lifshitz.hpp"
#include "casimir3/spectrogram.hpp"

namespace casimir3::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {
    line(columns_);
  }
  void row(const std::vector<std::string>& cells) { line(cells); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const { return out_.str(); }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::vector<std::string> columns_;
  std::ostringstream out_;
};

struct SweepUnit {
  std::string suffix;
  double scale;  // SI per file unit
};

SweepUnit sweep_unit(SweepParameter p) {
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

double hz(double w) { return units::to_hz(w); }

json hz_array(const std::array<double, 3>& w) { return {hz(w[0]), hz(w[1]), hz(w[2])}; }

json resolved_block(const PreparedSystem& system) {
  const auto& c = system.config();
  const auto& m = system.model();
  return {{"omega_mod1_hz", hz(c.modulation.omega_mod1)},
          {"omega_mod2_hz", hz(c.modulation.omega_mod2)},
          {"drive_frequency_hz", hz(c.drive.frequency)},
          {"mode_frequencies_hz", hz_array(m.omega)},
          {"mode_damping_hz", hz_array(m.gamma)},
          {"g12_hz", hz(m.g12)},
          {"g23_hz", hz(m.g23)},
          {"delta2_hz", hz(m.delta2)},
          {"delta3_hz", hz(m.delta3)}};
}

// Reference frame of each cantilever's slow amplitude: ω1, ω1 + ωmod1,
// ω1 + ωmod1 - ωmod2.
std::array<double, 3> frames(const PreparedSystem& system) {
  const auto& mod = system.config().modulation;
  const double w1 = system.model().omega[0];
  return {w1, w1 + mod.omega_mod1, w1 + mod.omega_mod1 - mod.omega_mod2};
}

class ResultBuilder {
 public:
  ResultBuilder(std::string subcommand, const SystemConfig& snapshot) {
    result_.manifest = {{"subcommand", std::move(subcommand)},
                        {"figure", snapshot.figure},
                        {"seed", snapshot.seed},
                        {"config", "config.json"},
                        {"files", json::array()}};
    config_json_ = config_to_json(snapshot).dump(2) + "\n";
  }

  void csv(const std::string& name, const Csv& table) {
    result_.files.push_back({name, table.str()});
    result_.manifest["files"].push_back({{"name", name}, {"columns", table.columns()}});
  }
  void json_file(const std::string& name, const json& j) {
    result_.files.push_back({name, j.dump(2) + "\n"});
    result_.manifest["files"].push_back({{"name", name}});
  }
  void raw(const std::string& name, std::string contents, std::vector<std::string> columns) {
    result_.files.push_back({name, std::move(contents)});
    result_.manifest["files"].push_back({{"name", name}, {"columns", std::move(columns)}});
  }
  json& manifest() { return result_.manifest; }
  void unstable(int rows) { result_.unstable_rows = rows; }

  CommandResult finish() {
    result_.manifest["unstable_rows"] = result_.unstable_rows;
    result_.manifest["exit_code"] = result_.exit_code();
    result_.files.push_back({"config.json", config_json_});
    result_.files.push_back({"manifest.json", result_.manifest.dump(2) + "\n"});
    return std::move(result_);
  }

 private:
  CommandResult result_;
  std::string config_json_;
};

template <class T>
const T& require(const std::optional<T>& section, const char* key) {
  if (!section) throw ConfigError("section required by this subcommand is missing", key);
  return *section;
}

std::vector<std::string> sweep_columns(const SweepSpec& sweep) {
  const auto u = sweep_unit(sweep.parameter);
  std::vector<std::string> c{std::string(to_string(sweep.parameter)) + "_" + u.suffix};
  if (sweep.relative) c.push_back("detuning_" + u.suffix);
  return c;
}

std::vector<std::string> sweep_cells(const SweepSpec& sweep, std::size_t i, double absolute) {
  const auto u = sweep_unit(sweep.parameter);
  std::vector<std::string> c{num(absolute / u.scale)};
  if (sweep.relative) c.push_back(num(sweep.values[i] / u.scale));
  return c;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"force-curve", "eigen-sweep",  "spectrogram",
                                              "transduction", "calibrate", "material-table"};
  return names;
}

CommandResult cmd_force_curve(const SystemConfig& config, int threads) {
  const auto& fc = require(config.force_curve, "force_curve");
  const auto system = PreparedSystem::prepare(config, threads);
  ResultBuilder out("force-curve", system.config());
  Csv csv({"d1_m", "d2_m", "force_N", "gradient_N_per_m", "force_pair1_N", "force_pair2_N",
           "gradient_pair1_N_per_m", "gradient_pair2_N_per_m"});
  for (double v : fc.values) {
    double d1 = v, d2 = fc.fixed;
    if (fc.mode == ForceCurveMode::MoveCenter) d2 = fc.total - v;
    if (fc.mode == ForceCurveMode::MoveThird) d1 = fc.fixed, d2 = v;
    const auto p1 = system.table1().evaluate(d1);
    const auto p2 = system.table2().evaluate(d2);
    // Force on the center plate and its gradient with respect to the plate's
    // own position (d1 shrinks, d2 grows as it moves toward cantilever 1).
    csv.row({num(d1), num(d2), num(p1.force - p2.force), num(-p1.gradient - p2.gradient),
             num(p1.force), num(-p2.force), num(-p1.gradient), num(-p2.gradient)});
  }
  out.csv("force_curve.csv", csv);
  out.manifest()["mode"] = fc.mode == ForceCurveMode::MoveCenter ? "move-center"
                           : fc.mode == ForceCurveMode::MoveFirst ? "move-1"
                                                                   : "move-3";
  return out.finish();
}

CommandResult cmd_eigen_sweep(const SystemConfig& config, int threads) {
  const auto& es = require(config.eigen_sweep, "eigen_sweep");
  const auto system = PreparedSystem::prepare(config, threads);
  const auto& m = system.model();
  const double g12 = es.g12.value_or(m.g12);
  const double g23 = es.g23.value_or(m.g23);
  const std::array<double, 3> gamma = es.include_damping ? m.gamma : std::array<double, 3>{};
  ResultBuilder out("eigen-sweep", system.config());
  Csv csv({"delta3_hz", "re1_hz", "im1_hz", "re2_hz", "im2_hz", "re3_hz", "im3_hz"});
  for (double d3 : es.delta3) {
    const auto ev = eigenvalues(make_reduced_model(gamma, g12, g23, es.delta2, d3));
    std::vector<std::string> row{num(hz(d3))};
    for (const auto& l : ev) {
      row.push_back(num(hz(l.real())));
      row.push_back(num(hz(l.imag())));
    }
    csv.row(row);
  }
  out.csv("eigenvalues.csv", csv);
  out.manifest()["resolved"] = resolved_block(system);
  out.manifest()["g12_hz"] = hz(g12);
  out.manifest()["g23_hz"] = hz(g23);
  out.manifest()["delta2_hz"] = hz(es.delta2);
  out.manifest()["include_damping"] = es.include_damping;
  return out.finish();
}

CommandResult cmd_spectrogram(const SystemConfig& config, int threads) {
  const auto& spec = require(config.spectrogram, "spectrogram");
  const auto system = PreparedSystem::prepare(config, threads);
  SpectrogramOptions options;
  options.duration = spec.duration;
  options.segment = spec.segment;
  options.threads = threads;
  const Spectrogram sg = sweep_spectrogram(system, spec.sweep, options);
  const auto values = sweep_values(spec.sweep, system.config());
  ResultBuilder out("spectrogram", system.config());

  // Band columns are shared by every row and cantilever.
  const auto& freqs = sg.rows.front().psd[0].frequencies;
  std::size_t lo = 0, hi = 0;
  while (lo < freqs.size() && freqs[lo] < spec.band_low) ++lo;
  hi = lo;
  while (hi < freqs.size() && freqs[hi] <= spec.band_high) ++hi;
  if (hi == lo) throw ConfigError("band contains no PSD bins", "spectrogram.band_low_hz");

  const auto first = sweep_columns(spec.sweep);
  for (int c = 0; c < 3; ++c) {
    std::vector<std::string> columns = first;
    for (std::size_t k = lo; k < hi; ++k) columns.push_back(num(freqs[k]));
    Csv csv(columns);
    for (std::size_t r = 0; r < sg.rows.size(); ++r) {
      std::vector<std::string> row = sweep_cells(spec.sweep, r, values[r]);
      const auto& psd = sg.rows[r].psd[static_cast<std::size_t>(c)].values;
      for (std::size_t k = lo; k < hi; ++k) row.push_back(num(psd[k]));
      csv.row(row);
    }
    const std::string name = "psd_cantilever" + std::to_string(c + 1) + ".csv";
    out.raw(name, csv.str(), {first.begin(), first.end()});
  }

  json rows = json::array();
  for (std::size_t r = 0; r < sg.rows.size(); ++r) {
    const auto row_system = system.with(with_parameter(
        system.source_config(), spec.sweep.parameter, values[r], spec.sweep.delta_d2_ratio));
    const auto ev = eigenvalues(row_system.model());
    const auto f = frames(row_system);
    json branches = json::array();
    for (std::size_t c = 0; c < 3; ++c) {
      json b = json::array();
      for (const auto& l : ev) b.push_back(hz(f[c] + l.real()));
      branches.push_back(b);
    }
    rows.push_back({{"value", values[r] / sweep_unit(spec.sweep.parameter).scale},
                    {"seed", sg.rows[r].seed},
                    {"branches_hz", branches}});
  }
  const auto& psd0 = sg.rows.front().psd[0];
  json meta = {{"parameter", to_string(spec.sweep.parameter)},
               {"unit", sweep_unit(spec.sweep.parameter).suffix},
               {"relative", spec.sweep.relative},
               {"duration_s", spec.duration},
               {"segment_s", spec.segment},
               {"resolution_hz", psd0.resolution()},
               {"sample_rate_hz", psd0.sample_rate},
               {"band_hz", {freqs[lo], freqs[hi - 1]}},
               {"bins", hi - lo},
               {"psd_units", "m^2/Hz"},
               {"rows", rows}};
  out.json_file("spectrogram.json", meta);
  out.manifest()["resolved"] = resolved_block(system);
  return out.finish();
}

CommandResult cmd_transduction(const SystemConfig& config, int threads) {
  const auto& sweep = require(config.transduction, "transduction");
  const auto system = PreparedSystem::prepare(config, threads);
  const auto rows = sweep_transduction(system, sweep, threads);
  ResultBuilder out("transduction", system.config());
  auto columns = sweep_columns(sweep);
  for (const char* c : {"A1_m", "A2_m", "A3_m", "ratio", "eq3_ratio", "stability_margin_per_s",
                        "stability", "transient_s"})
    columns.emplace_back(c);
  Csv csv(columns);
  int unstable = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto cells = sweep_cells(sweep, i, r.value);
    if (r.result) {
      for (double a : r.result->amplitudes) cells.push_back(num(a));
      cells.push_back(num(r.result->ratio));
    } else {
      ++unstable;
      cells.insert(cells.end(), 4, "");
      if (r.divergence) std::cerr << "casimir3: row " << i << " diverged: " << *r.divergence << '\n';
    }
    cells.push_back(r.closed_form ? num(*r.closed_form) : "");
    cells.push_back(num(r.stability.margin));
    cells.emplace_back(r.divergence ? "diverged" : to_string(r.stability.status));
    cells.push_back(r.result ? num(r.result->transient) : "");
    csv.row(cells);
  }
  out.csv("transduction.csv", csv);
  out.manifest()["resolved"] = resolved_block(system);
  out.unstable(unstable);
  return out.finish();
}

CommandResult cmd_calibrate(const SystemConfig& config) {
  const auto& spec = require(config.calibration, "calibration");
  if (spec.records_file.empty())
    throw ConfigError("records file required", "calibration.records_file");
  std::ifstream in(spec.records_file);
  if (!in) throw ConfigError("cannot open '" + spec.records_file + "'", "calibration.records_file");
  const auto& cant = config.cantilevers[static_cast<std::size_t>(spec.cantilever - 1)];
  const auto records = read_shift_records(in, cant.omega, cant.k_spring);
  const double radius = spec.cantilever == 3 ? config.geometry.R2 : config.geometry.R1;
  const auto fit = calibrate_separation(records, radius);

  json report = {{"cantilever", spec.cantilever},
                 {"records", records.size()},
                 {"sphere_radius_um", radius * 1e6},
                 {"separation_nm", fit.separation * 1e9},
                 {"patch_potential_v", fit.patch_potential},
                 {"casimir_gradient_n_per_m", fit.casimir_gradient},
                 {"residual_rad_per_s", fit.residual}};
  if (fit.separation >= 1e-9 && fit.separation <= 1e-5 && radius / fit.separation >= 10.0)
    report["lifshitz_gradient_n_per_m"] =
        pfa_sphere_plate(config.material, radius, fit.separation, config.temperature).gradient;
  ResultBuilder out("calibrate", config);
  out.json_file("calibration.json", report);
  return out.finish();
}

CommandResult cmd_material_table(const SystemConfig& config, int threads) {
  const auto system = PreparedSystem::prepare(config, threads);
  ResultBuilder out("material-table", system.config());
  const std::vector<std::string> table_columns{"separation_m", "force_N", "gradient_N_per_m",
                                               "curvature_N_per_m2", "temperature_K"};
  std::ostringstream t1, t2;
  system.table1().write_csv(t1);
  system.table2().write_csv(t2);
  out.raw("casimir_table_pair1.csv", t1.str(), table_columns);
  out.raw("casimir_table_pair2.csv", t2.str(), table_columns);

  Csv eps({"xi_rad_s", "epsilon"});
  constexpr int kPoints = 141;
  for (int i = 0; i < kPoints; ++i) {
    const double xi = std::pow(10.0, 11.0 + 7.0 * i / (kPoints - 1));
    const auto e = permittivity_at(config.material, xi);
    eps.row({num(xi), e.infinite ? "inf" : num(e.value)});
  }
  out.csv("permittivity.csv", eps);
  out.manifest()["material"] = config.material.describe();
  return out.finish();
}

CommandResult run_command(const std::string& subcommand, const GlobalOptions& options) {
  if (options.threads < 1) throw ConfigError("must be >= 1", "--threads");
  SystemConfig config = load_config(options.config);
  if (options.seed) config.seed = *options.seed;
  config.validate();
  if (subcommand == "force-curve") return cmd_force_curve(config, options.threads);
  if (subcommand == "eigen-sweep") return cmd_eigen_sweep(config, options.threads);
  if (subcommand == "spectrogram") return cmd_spectrogram(config, options.threads);
  if (subcommand == "transduction") return cmd_transduction(config, options.threads);
  if (subcommand == "calibrate") return cmd_calibrate(config);
  if (subcommand == "material-table") return cmd_material_table(config, options.threads);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

void write_outputs(const CommandResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string tag = ".partial-" + std::to_string(::getpid());
  std::vector<fs::path> staged;
  try {
    for (const auto& f : result.files) {
      const fs::path tmp = dir / (f.name + tag);
      staged.push_back(tmp);
      std::ofstream os(tmp, std::ios::binary);
      os << f.contents;
      os.close();
      if (!os) throw NumericalError("cannot write " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
    throw;
  }
  for (std::size_t i = 0; i < staged.size(); ++i)
    fs::rename(staged[i], dir / result.files[i].name);
}

int report_current_exception() {
  auto fail = [](const char* kind, const std::exception& e, int code) {
    std::cerr << "casimir3: " << kind << ": " << e.what() << '\n';
    return code;
  };
  try {
    throw;
  } catch (const ConfigError& e) {
    return fail("configuration error", e, kConfigFailure);
  } catch (const DomainError& e) {
    return fail("configuration error", e, kConfigFailure);
  } catch (const RangeError& e) {
    return fail("configuration error", e, kConfigFailure);
  } catch (const PreconditionError& e) {
    return fail("configuration error", e, kConfigFailure);
  } catch (const InstabilityError& e) {
    return fail("unstable", e, kUnstableRows);
  } catch (const NumericalError& e) {
    return fail("numerical failure", e, kNumericalFailure);
  } catch (const FitError& e) {
    return fail("fit failure", e, kNumericalFailure);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("i/o error", e, kNumericalFailure);
  } catch (const std::exception& e) {
    return fail("error", e, 1);
  }
}

}  // namespace casimir3::cli
