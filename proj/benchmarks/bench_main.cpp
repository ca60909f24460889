#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "casimir3/casimir_table.hpp"
#include "casimir3/dynamics.hpp"
#include "casimir3/lifshitz.hpp"
#include "casimir3/spectral.hpp"
#include "casimir3/system_config.hpp"

using namespace casimir3;

namespace {

const CasimirTable& shared_table() {
  static const CasimirTable t =
      CasimirTable::build(MaterialModel::gold_drude(), 35e-6, 300.0, {50e-9, 400e-9, 120});
  return t;
}

void BM_LifshitzDrude300K(benchmark::State& state) {
  const auto gold = MaterialModel::gold_drude();
  const double x = static_cast<double>(state.range(0)) * 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(pfa_sphere_plate(gold, 35e-6, x, 300.0));
}
BENCHMARK(BM_LifshitzDrude300K)->Arg(50)->Arg(100)->Arg(800);

void BM_LifshitzZeroTemperature(benchmark::State& state) {
  const auto gold = MaterialModel::gold_drude();
  for (auto _ : state) benchmark::DoNotOptimize(pfa_sphere_plate(gold, 35e-6, 100e-9, 0.0));
}
BENCHMARK(BM_LifshitzZeroTemperature);

void BM_TableLookup(benchmark::State& state) {
  const auto& table = shared_table();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(60e-9, 390e-9);
  std::vector<double> xs(4096);
  for (double& x : xs) x = u(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(table.evaluate(xs[i++ & 4095]));
}
BENCHMARK(BM_TableLookup);

void BM_Rk4Step(benchmark::State& state) {
  const auto cfg = default_config();
  SimulationSetup setup;
  setup.cantilevers = cfg.cantilevers;
  for (std::size_t i = 0; i < 3; ++i) setup.noise_gamma[i] = cfg.cantilevers[i].gamma;
  setup.geometry = cfg.geometry;
  setup.modulation = cfg.modulation;
  setup.modulation.omega_mod1 = 2.0 * M_PI * 465.0;
  setup.modulation.omega_mod2 = 2.0 * M_PI * 1230.0;
  setup.noise.enabled = state.range(0) != 0;
  setup.table1 = &shared_table();
  setup.table2 = &shared_table();
  const Simulator sim(setup);
  SimulationState s;
  s.rng.seed(3);
  const double dt = sim.max_dt();
  for (auto _ : state) sim.advance(s, dt);
  benchmark::DoNotOptimize(s.x);
}
BENCHMARK(BM_Rk4Step)->Arg(0)->Arg(1);

void BM_WelchPsd(benchmark::State& state) {
  const double fs = 25600.0;
  const auto seconds = static_cast<std::size_t>(state.range(0));
  std::vector<double> trace(seconds * 25600);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1e-12);
  for (std::size_t i = 0; i < trace.size(); ++i)
    trace[i] = 1e-10 * std::sin(2.0 * M_PI * 6000.0 * static_cast<double>(i) / fs) + n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(welch_psd(trace, fs, 8 * 25600, 0.5));
}
BENCHMARK(BM_WelchPsd)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
