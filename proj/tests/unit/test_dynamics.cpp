#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "casimir3/constants.hpp"
#include "casimir3/dynamics.hpp"
#include "casimir3/errors.hpp"

using namespace casimir3;
using units::hz;

namespace {

const CasimirTable& table() {
  static const CasimirTable t =
      CasimirTable::build(MaterialModel::gold_drude(), 35e-6, 300.0, {50e-9, 1e-6, 150});
  return t;
}

SimulationSetup single(double gamma) {
  SimulationSetup s;
  s.cantilevers = {CantileverParams::from_stiffness(0.185, hz(5661.0), gamma),
                   CantileverParams::from_stiffness(0.104, hz(6172.0), gamma),
                   CantileverParams::from_stiffness(0.185, hz(4892.0), gamma)};
  s.noise_gamma = {gamma, gamma, gamma};
  s.geometry = {100e-9, 105e-9, 35e-6, 35e-6};
  s.clamped = {false, true, true};
  return s;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("instantaneous gaps") {
  const Geometry g{100e-9, 105e-9, 35e-6, 35e-6};
  const ModulationSettings m{hz(465.0), hz(1230.0), 6e-9, 8.5e-9};
  SimulationState s;
  auto d = instantaneous_gaps(g, m, s);
  CHECK(d[0] == doctest::Approx(100e-9 - 14.5e-9).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(105e-9 + 14.5e-9).epsilon(1e-14));

  d = instantaneous_gaps(g, {}, s);
  CHECK(d[0] == 100e-9);
  CHECK(d[1] == 105e-9);

  s.x = {0.0, 1e-9, 0.0};
  d = instantaneous_gaps(g, {}, s);
  CHECK(d[0] == doctest::Approx(99e-9).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(106e-9).epsilon(1e-14));

  s.x = {-120e-9, 0.0, 0.0};
  CHECK_THROWS_AS(instantaneous_gaps(g, {}, s), ContactError);
}

TEST_CASE("free damped cantilever") {
  const double gamma = hz(3.22);
  const Simulator sim(single(gamma));
  SimulationState s;
  s.x[0] = 1e-9;
  const double dt = sim.max_dt();
  const auto& c = sim.setup().cantilevers[0];
  std::vector<double> times, log_energy, crossings;
  double prev_x = s.x[0], prev_t = 0.0;
  const long steps = std::lround(0.5 / dt);
  for (long n = 0; n < steps; ++n) {
    sim.advance(s, dt);
    if (prev_x < 0.0 && s.x[0] >= 0.0)
      crossings.push_back(prev_t + dt * (-prev_x) / (s.x[0] - prev_x));
    prev_x = s.x[0];
    prev_t = s.t;
    if (n % 50 == 0) {
      times.push_back(s.t);
      log_energy.push_back(std::log(0.5 * c.k_spring * s.x[0] * s.x[0] + 0.5 * c.mass * s.v[0] * s.v[0]));
    }
  }
  const double period = (crossings.back() - crossings.front()) / (crossings.size() - 1);
  CHECK(units::kTwoPi / period == doctest::Approx(c.omega).epsilon(5e-3));
  // Energy decays at γ, the amplitude at γ/2.
  CHECK(-0.5 * slope(times, log_energy) == doctest::Approx(gamma / 2.0).epsilon(5e-3));
  CHECK(s.x[1] == 0.0);
  CHECK(s.x[2] == 0.0);
}

TEST_CASE("undamped energy conservation over 1e4 cycles") {
  const Simulator sim(single(0.0));
  const auto& c = sim.setup().cantilevers[0];
  const double period = units::kTwoPi / c.omega;
  const double dt = period / 1000.0;
  SimulationState s;
  s.x[0] = 1e-9;
  auto energy = [&] { return 0.5 * c.k_spring * s.x[0] * s.x[0] + 0.5 * c.mass * s.v[0] * s.v[0]; };
  const double e0 = energy();
  for (long n = 0; n < 10000L * 1000L; ++n) sim.advance(s, dt);
  CHECK(std::abs(energy() / e0 - 1.0) < 1e-8);
}

TEST_CASE("relaxes to the static equilibrium") {
  auto setup = single(hz(60.0));
  setup.clamped = {false, false, false};
  setup.table1 = &table();
  setup.table2 = &table();
  setup.about_equilibrium = false;
  const Simulator sim(setup);
  SimulationState s;
  const double dt = sim.max_dt();
  for (long n = 0; n < std::lround(0.3 / dt); ++n) sim.advance(s, dt);

  const auto xs = static_equilibrium(setup);
  for (int i = 0; i < 3; ++i) CHECK(s.x[i] == doctest::Approx(xs[i]).epsilon(1e-6));

  // Independent check of the force balance at the simulated rest point.
  const double d1 = setup.geometry.d1 + s.x[0] - s.x[1];
  const double d2 = setup.geometry.d2 + s.x[1] - s.x[2];
  const double f1 = table().force(d1), f2 = table().force(d2);
  const std::array<double, 3> f{-f1, f1 - f2, f2};
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(f[i]) == doctest::Approx(std::abs(setup.cantilevers[i].k_spring * s.x[i])).epsilon(1e-6));
}

TEST_CASE("about_equilibrium starts at rest") {
  auto setup = single(hz(3.0));
  setup.clamped = {false, false, false};
  setup.table1 = &table();
  setup.table2 = &table();
  const Simulator sim(setup);
  SimulationState s;
  for (int n = 0; n < 10000; ++n) sim.advance(s, sim.max_dt());
  for (int i = 0; i < 3; ++i) CHECK(s.x[i] == 0.0);
}

TEST_CASE("equipartition over 20 seeds") {
  const double gamma = hz(20.0);
  auto setup = single(gamma);
  setup.noise = {true, 300.0};
  const Simulator sim(setup);
  const double fs = 2000.0;
  const int sps = sim.steps_per_sample(fs);
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimulationState s;
    s.rng.seed(seed);
    const auto rec = sim.run(s, fs, sps, 2.5, 0.5);
    double acc = 0.0;
    for (double x : rec.x[0]) acc += x * x;
    mean += acc / static_cast<double>(rec.x[0].size()) / 20.0;
  }
  const double expected = 1.380649e-23 * 300.0 / setup.cantilevers[0].k_spring;
  CHECK(mean == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("seeded runs are reproducible") {
  auto setup = single(hz(5.0));
  setup.clamped = {false, false, false};
  setup.table1 = &table();
  setup.table2 = &table();
  setup.noise = {true, 300.0};
  setup.modulation = {hz(465.0), hz(1230.0), 3e-9, 4e-9};
  const Simulator sim(setup);
  auto trace = [&](std::uint64_t seed) {
    SimulationState s;
    s.rng.seed(seed);
    return sim.run(s, 25600.0, sim.steps_per_sample(25600.0), 0.05, 0.0).x[2];
  };
  CHECK(trace(42) == trace(42));
  CHECK(trace(42) != trace(43));
}

TEST_CASE("no noise and no drive stays at zero") {
  auto setup = single(hz(5.0));
  setup.clamped = {false, false, false};
  setup.table1 = &table();
  setup.table2 = &table();
  const Simulator sim(setup);
  SimulationState s;
  const auto rec = sim.run(s, 25600.0, sim.steps_per_sample(25600.0), 0.05, 0.0);
  for (const auto& x : rec.x)
    for (double v : x) CHECK(v == 0.0);
  CHECK(rec.x[0].size() == 1280);
  CHECK(rec.start_time == doctest::Approx(1.0 / 25600.0));
}

TEST_CASE("step limit and failure modes") {
  auto setup = single(hz(5.0));
  setup.clamped = {false, false, false};
  setup.table1 = &table();
  setup.table2 = &table();
  const Simulator sim(setup);
  SimulationState s;
  CHECK_THROWS_AS(sim.advance(s, 2.0 * sim.max_dt()), PreconditionError);
  CHECK(sim.max_dt() == doctest::Approx(1.0 / (200.0 * 6172.0)));

  SimulationState close;
  close.x = {-30e-9, 25e-9, 0.0};
  CHECK_THROWS_AS(sim.advance(close, sim.max_dt()), ContactError);

  auto bounded = setup;
  bounded.divergence_bound = 1e-9;
  SimulationState far;
  far.x = {2e-9, 0.0, 0.0};
  CHECK_THROWS_AS(Simulator(bounded).advance(far, sim.max_dt()), InstabilityError);

  SimulationState bad;
  bad.v[0] = NAN;
  CHECK_THROWS_AS(sim.advance(bad, sim.max_dt()), NumericalError);
}

TEST_CASE("trace csv header") {
  TraceSet t;
  t.sample_rate = 10.0;
  t.traces = {std::vector<double>{1e-12, 2e-12}, {0.0, 0.0}, {3e-12, 4e-12}};
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str().rfind("t_s,x1_m,x2_m,x3_m\n", 0) == 0);
  CHECK(t.size() == 2);
}
