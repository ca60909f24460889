#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "casimir3/errors.hpp"
#include "commands.hpp"

using namespace casimir3;
using namespace casimir3::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("casimir3_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_config(const TempDir& dir, const std::string& json, const char* name = "cfg.json") {
  const fs::path p = dir.path / name;
  std::ofstream(p) << json;
  return p;
}

CommandResult run(const std::string& sub, const fs::path& config, int threads = 1) {
  GlobalOptions o;
  o.config = config;
  o.threads = threads;
  return run_command(sub, o);
}

const std::string& file(const CommandResult& r, const std::string& name) {
  for (const auto& f : r.files)
    if (f.name == name) return f.contents;
  FAIL("missing output " << name);
  static std::string none;
  return none;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) { return std::stod(s); }

const char* kEigenBase = R"({
  "geometry": {"d1_nm": 88, "d2_nm": 90},
  "modulation": {"delta_d1_nm": 10.4, "delta_d2_nm": 14.1},
  "eigen_sweep": {)";

}  // namespace

TEST_CASE("eigen-sweep without coupling gives the diagonal lines") {
  TempDir dir;
  const auto cfg = write_config(dir, std::string(kEigenBase) + R"(
    "delta3_hz": {"start": -50, "stop": 50, "points": 11}, "delta2_hz": 7,
    "g12_hz": 0, "g23_hz": 0, "include_damping": false}})");
  const auto rows = parse_csv(file(run("eigen-sweep", cfg), "eigenvalues.csv"));
  REQUIRE(rows.size() == 12);
  CHECK(rows[0][0] == "delta3_hz");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double d3 = num(rows[r][0]);
    std::vector<double> expect{0.0, -7.0, -d3};
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < 3; ++k) {
      CHECK(num(rows[r][1 + 2 * k]) == doctest::Approx(expect[k]).epsilon(1e-12));
      CHECK(num(rows[r][2 + 2 * k]) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("eigen-sweep anti-crossing gap at zero detuning") {
  TempDir dir;
  const auto cfg = write_config(dir, std::string(kEigenBase) + R"(
    "delta3_values_hz": [-20, -5, 0, 5, 20], "g12_hz": 20, "g23_hz": 20,
    "include_damping": false}})");
  const auto rows = parse_csv(file(run("eigen-sweep", cfg), "eigenvalues.csv"));
  REQUIRE(rows.size() == 6);
  // Independent eigensolve of the δ3 = 0 Hamiltonian (Hz units).
  Eigen::Matrix3d H;
  H << 0, 10, 0, 10, 0, 10, 0, 10, 0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
  const auto ev = es.eigenvalues();
  CHECK(num(rows[3][0]) == 0.0);
  CHECK(num(rows[3][5]) - num(rows[3][1]) == doctest::Approx(ev(2) - ev(0)).epsilon(1e-10));
  CHECK(ev(2) - ev(0) == doctest::Approx(std::sqrt(2.0) * 20.0).epsilon(1e-12));
  // Outer-branch separation is smallest at resonance.
  for (std::size_t r = 1; r < rows.size(); ++r)
    CHECK(num(rows[r][5]) - num(rows[r][1]) >= num(rows[3][5]) - num(rows[3][1]) - 1e-9);
}

TEST_CASE("eigen-sweep reversal reverses rows") {
  TempDir dir;
  const auto fwd = write_config(dir, std::string(kEigenBase) + R"(
    "delta3_values_hz": [-30, -10, 0, 15, 40]}})", "a.json");
  const auto rev = write_config(dir, std::string(kEigenBase) + R"(
    "delta3_values_hz": [40, 15, 0, -10, -30]}})", "b.json");
  auto a = parse_csv(file(run("eigen-sweep", fwd), "eigenvalues.csv"));
  auto b = parse_csv(file(run("eigen-sweep", rev), "eigenvalues.csv"));
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 1; r < a.size(); ++r) CHECK(a[r] == b[a.size() - r]);
}

TEST_CASE("force-curve move-center is symmetric with zero net force at the midpoint") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({
    "geometry": {"d1_nm": 380, "d2_nm": 380},
    "force_curve": {"mode": "move-center", "total_nm": 760,
                    "sweep_nm": {"start": 280, "stop": 480, "points": 21}}})");
  const auto r = run("force-curve", cfg);
  const auto rows = parse_csv(file(r, "force_curve.csv"));
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == std::vector<std::string>{"d1_m", "d2_m", "force_N", "gradient_N_per_m",
                                            "force_pair1_N", "force_pair2_N",
                                            "gradient_pair1_N_per_m", "gradient_pair2_N_per_m"});
  CHECK(num(rows[11][0]) == doctest::Approx(380e-9));
  CHECK(std::abs(num(rows[11][2])) < 1e-12 * std::abs(num(rows[1][2])));
  for (std::size_t k = 1; k <= 10; ++k) {
    CHECK(num(rows[k][2]) == doctest::Approx(-num(rows[22 - k][2])).epsilon(1e-9));
    CHECK(num(rows[k][3]) == doctest::Approx(num(rows[22 - k][3])).epsilon(1e-9));
  }
  // Nearer to cantilever 1 the net force points toward it.
  CHECK(num(rows[1][2]) > 0.0);
}

TEST_CASE("force-curve move-1 keeps the second pair constant") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({
    "geometry": {"d1_nm": 276, "d2_nm": 310},
    "force_curve": {"mode": "move-1", "fixed_nm": 310, "values_nm": [150, 200, 300, 450]}})");
  const auto rows = parse_csv(file(run("force-curve", cfg), "force_curve.csv"));
  REQUIRE(rows.size() == 5);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    CHECK(num(rows[r][1]) == doctest::Approx(310e-9));
    CHECK(rows[r][5] == rows[1][5]);
    CHECK(rows[r][7] == rows[1][7]);
    CHECK(num(rows[r][3]) ==
          doctest::Approx(num(rows[r][6]) + num(rows[r][7])).epsilon(1e-12));
  }
}

TEST_CASE("force-curve with an empty sweep writes only the header") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({
    "force_curve": {"mode": "move-3", "fixed_nm": 276, "values_nm": []}})");
  const auto r = run("force-curve", cfg);
  const auto& text = file(r, "force_curve.csv");
  CHECK(text == "d1_m,d2_m,force_N,gradient_N_per_m,force_pair1_N,force_pair2_N,"
                "gradient_pair1_N_per_m,gradient_pair2_N_per_m\n");
}

TEST_CASE("outputs are byte-identical across runs and carry a manifest") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({
    "figure": "fig2ce",
    "noise": {"enabled": true},
    "drive": {"amplitude_n": 0},
    "seed": 99,
    "spectrogram": {"parameter": "omega_mod2", "detuning_hz": {"start": -10, "stop": 10,
                    "points": 2}, "duration_s": 2, "segment_s": 1,
                    "band_low_hz": 6000, "band_high_hz": 6100}})");
  const auto a = run("spectrogram", cfg);
  const auto b = run("spectrogram", cfg, 2);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].name == b.files[i].name);
    CHECK(a.files[i].contents == b.files[i].contents);
  }
  const auto manifest = nlohmann::json::parse(file(a, "manifest.json"));
  CHECK(manifest["figure"] == "fig2ce");
  CHECK(manifest["subcommand"] == "spectrogram");
  CHECK(manifest["seed"] == 99);
  CHECK(manifest["files"].size() == 4);
  const auto psd = parse_csv(file(a, "psd_cantilever2.csv"));
  REQUIRE(psd.size() == 3);
  CHECK(psd[0][0] == "omega_mod2_hz");
  CHECK(psd[0][1] == "detuning_hz");
  CHECK(num(psd[0][2]) == doctest::Approx(6000.0));
  CHECK(psd[1].size() == psd[0].size());
  const auto meta = nlohmann::json::parse(file(a, "spectrogram.json"));
  CHECK(meta["rows"].size() == 2);
  CHECK(meta["rows"][0]["branches_hz"].size() == 3);
  const auto snapshot = nlohmann::json::parse(file(a, "config.json"));
  CHECK(snapshot["modulation"]["omega_mod1_hz"].is_number());

  write_outputs(a, dir.path / "out");
  for (const auto& f : a.files) {
    std::ifstream in(dir.path / "out" / f.name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == f.contents);
  }
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path / "out")) ++n;
  CHECK(n == a.files.size());
}

TEST_CASE("transduction flags unstable rows with exit code 4") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({
    "table": {"min_separation_nm": 50, "max_separation_nm": 400, "points": 120},
    "transduction": {"parameter": "gain", "values_hz": [0, 12]}})");
  const auto r = run("transduction", cfg);
  CHECK(r.unstable_rows == 1);
  CHECK(r.exit_code() == kUnstableRows);
  const auto rows = parse_csv(file(r, "transduction.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "gain_hz");
  CHECK(rows[1][7] == "stable");
  CHECK(num(rows[1][4]) > 0.0);
  CHECK(num(rows[1][4]) == doctest::Approx(num(rows[1][5])).epsilon(0.05));
  CHECK(rows[2][7] == "unstable");
  CHECK(rows[2][1].empty());
  CHECK(num(rows[2][6]) < 0.0);
}

TEST_CASE("calibrate recovers the generating separation") {
  TempDir dir;
  const double x = 120e-9, vc = 0.04, R = 35e-6, eps0 = 8.8541878128e-12;
  const double omega = 2.0 * kPi * 6172.0, k = 0.106653922922;
  {
    std::ofstream out(dir.path / "records.csv");
    out << "V_ext_V,delta_omega_rad_s\n";
    out.precision(17);
    for (int i = 0; i <= 20; ++i) {
      const double v = -0.3 + 0.03 * i;
      const double force_gradient = kPi * eps0 * R / (x * x) * (v - vc) * (v - vc) - 2e-4;
      out << v << ',' << -omega / (2.0 * k) * force_gradient << '\n';
    }
  }
  const auto cfg = write_config(dir, R"({
    "calibration": {"cantilever": 2, "records_file": "records.csv"}})");
  const auto r = run("calibrate", cfg);
  const auto report = nlohmann::json::parse(file(r, "calibration.json"));
  CHECK(report["separation_nm"].get<double>() == doctest::Approx(120.0).epsilon(1e-6));
  CHECK(report["patch_potential_v"].get<double>() == doctest::Approx(0.04).epsilon(1e-6));
  CHECK(report["casimir_gradient_n_per_m"].get<double>() == doctest::Approx(-2e-4).epsilon(1e-6));
  CHECK(report["records"] == 21);
}

TEST_CASE("material-table writes both pair tables and the permittivity") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({"geometry": {"r2_um": 50},
    "table": {"min_separation_nm": 60, "max_separation_nm": 300, "points": 20}})");
  const auto r = run("material-table", cfg);
  const auto t1 = parse_csv(file(r, "casimir_table_pair1.csv"));
  const auto t2 = parse_csv(file(r, "casimir_table_pair2.csv"));
  REQUIRE(t1.size() == 21);
  REQUIRE(t2.size() == 21);
  // Proximity-force scaling with the sphere radius.
  CHECK(num(t2[5][1]) / num(t1[5][1]) == doctest::Approx(50.0 / 35.0).epsilon(1e-12));
  const auto eps = parse_csv(file(r, "permittivity.csv"));
  REQUIRE(eps.size() == 142);
  for (std::size_t i = 2; i < eps.size(); ++i) CHECK(num(eps[i][1]) <= num(eps[i - 1][1]));
}

TEST_CASE("configuration errors map to exit code 2 with the key path") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({"geometry": {"d1_nm": 100, "bogus_nm": 3},
    "force_curve": {"mode": "move-1", "fixed_nm": 310, "values_nm": [200]}})");
  try {
    run("force-curve", cfg);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("geometry.bogus_nm") != std::string::npos);
    CHECK(report_current_exception() == kConfigFailure);
  }
  const auto missing = write_config(dir, "{}", "empty.json");
  CHECK_THROWS_AS(run("transduction", missing), ConfigError);
}

TEST_CASE("exception categories map onto exit codes") {
  auto code = [](auto make) {
    try {
      throw make();
    } catch (...) {
      return report_current_exception();
    }
  };
  CHECK(code([] { return RangeError("r"); }) == kConfigFailure);
  CHECK(code([] { return PreconditionError("p"); }) == kConfigFailure);
  CHECK(code([] { return NumericalError("n"); }) == kNumericalFailure);
  CHECK(code([] { return SteadyStateError("s"); }) == kNumericalFailure);
  CHECK(code([] { return FitError("f"); }) == kNumericalFailure);
  CHECK(code([] { return InstabilityError("i", 1.0); }) == kUnstableRows);
}

TEST_CASE("the executable writes nothing when the configuration is rejected") {
  TempDir dir;
  const auto cfg = write_config(dir, R"({"temperature_k": -1,
    "force_curve": {"mode": "move-1", "fixed_nm": 310, "values_nm": [200]}})");
  const fs::path out = dir.path / "out";
  const std::string cmd = std::string(CASIMIR3_CLI_PATH) + " --config " + cfg.string() +
                          " --out " + out.string() + " force-curve 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == kConfigFailure);
  CHECK_FALSE(fs::exists(out));

  const auto good = write_config(dir, R"({"figure": "fig1d",
    "force_curve": {"mode": "move-1", "fixed_nm": 310, "values_nm": [200, 250]}})", "ok.json");
  const std::string ok = std::string(CASIMIR3_CLI_PATH) + " --config " + good.string() +
                         " --seed 5 --out " + out.string() + " force-curve";
  const int ok_status = std::system(ok.c_str());
  REQUIRE(WIFEXITED(ok_status));
  CHECK(WEXITSTATUS(ok_status) == kSuccess);
  CHECK(fs::exists(out / "force_curve.csv"));
  std::ifstream m(out / "manifest.json");
  const auto manifest = nlohmann::json::parse(m);
  CHECK(manifest["figure"] == "fig1d");
  CHECK(manifest["seed"] == 5);
}
