#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "casimir3/casimir_table.hpp"
#include "casimir3/reduced_model.hpp"
#include "casimir3/system_config.hpp"

namespace casimir3 {

// Displacements are measured from the static equilibrium (or from the
// unloaded rest position when SimulationSetup::about_equilibrium is false);
// gap d1 grows with x1 and shrinks with x2, gap d2 grows with x2 and shrinks
// with x3.
struct SimulationState {
  double t = 0.0;
  std::array<double, 3> x{};
  std::array<double, 3> v{};
  std::mt19937_64 rng;
};

struct SimulationSetup {
  Cantilevers cantilevers;              // gamma already includes any gain
  std::array<double, 3> noise_gamma{};  // natural damping setting the thermal force
  Geometry geometry;
  ModulationSettings modulation;
  DriveSettings drive;
  NoiseSettings noise;
  const CasimirTable* table1 = nullptr;  // nullptr switches the pair force off
  const CasimirTable* table2 = nullptr;
  // Subtract the static pair forces at (d1, d2) so that x = 0 is the loaded
  // equilibrium and the geometry gaps are post-shift gaps.
  bool about_equilibrium = true;
  std::array<bool, 3> clamped{};
  double contact_gap = 10e-9;      // m
  double divergence_bound = 0.0;   // m; 0 means half the smaller gap
};

// d1 = d10 - s(t) + x1 - x2, d2 = d20 + s(t) + x2 - x3 with
// s(t) = δd1 cos(ωmod1 t) + δd2 cos(ωmod2 t).
std::array<double, 2> instantaneous_gaps(const Geometry& geom, const ModulationSettings& mods,
                                         const SimulationState& state);

struct Recording {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s
  std::array<std::vector<double>, 3> x;
};

class Simulator {
 public:
  explicit Simulator(SimulationSetup setup);

  const SimulationSetup& setup() const { return setup_; }

  // Largest admissible step, 1 / (200 f_max) over the cantilever and drive
  // frequencies.
  double max_dt() const { return max_dt_; }

  // One RK4 step followed by the thermal velocity impulse. Throws
  // PreconditionError for dt > max_dt(), ContactError when a gap closes below
  // the contact threshold or leaves the table, InstabilityError past the
  // divergence bound, NumericalError on non-finite state.
  void advance(SimulationState& state, double dt) const;
  SimulationState step(SimulationState state, double dt) const {
    advance(state, dt);
    return state;
  }

  // Integrates for `duration` seconds with `steps_per_sample` steps between
  // samples, recording displacements at t >= record_from.
  Recording run(SimulationState& state, double sample_rate, int steps_per_sample,
                double duration, double record_from) const;

  // Smallest number of steps per sample satisfying the step limit.
  int steps_per_sample(double sample_rate) const;

  // Static pair forces at the configured gaps (attraction > 0).
  std::array<double, 2> static_forces() const { return static_force_; }

 private:
  using Vec6 = std::array<double, 6>;
  Vec6 derivative(double t, const Vec6& y) const;
  void check_gaps(double t, const Vec6& y) const;

  SimulationSetup setup_;
  double max_dt_ = 0.0;
  std::array<double, 2> static_force_{};
  std::array<double, 3> noise_sigma_rate_{};  // σ² per unit dt
  double divergence_bound_ = 0.0;
};

// Root of k_i x_i = f_i(x) for the unmodulated, undriven setup with
// about_equilibrium = false.
std::array<double, 3> static_equilibrium(const SimulationSetup& setup);

struct TraceSet {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s
  std::array<std::vector<double>, 3> traces;
  SystemConfig metadata;
  std::uint64_t seed = 0;

  std::size_t size() const { return traces[0].size(); }
  // Header t_s,x1_m,x2_m,x3_m.
  void write_csv(std::ostream& out) const;
};

}  // namespace casimir3
