#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "casimir3/experiments.hpp"
#include "casimir3/spectral.hpp"

namespace casimir3 {

struct SpectrogramOptions {
  double duration = 64.0;  // s recorded per row
  double segment = 8.0;    // s per Welch segment
  int threads = 1;
};

struct SpectrogramRow {
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::array<PsdEstimate, 3> psd;  // one per cantilever
};

struct Spectrogram {
  SweepParameter parameter = SweepParameter::OmegaMod2;
  std::vector<SpectrogramRow> rows;
};

// Seed of row `index` derived from the master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// One thermal run per sweep value (noise must be enabled), rows computed
// concurrently and assembled in sweep order. Failures are rethrown with the
// sweep value prepended.
Spectrogram sweep_spectrogram(const PreparedSystem& system, const SweepSpec& sweep,
                              const SpectrogramOptions& options = {});

}  // namespace casimir3
