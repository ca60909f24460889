#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace casimir3 {

enum class Window { Hann };

// One-sided displacement PSD (m²/Hz) on the uniform grid k fs / N,
// k = 0..N/2.
struct PsdEstimate {
  std::vector<double> frequencies;  // Hz
  std::vector<double> values;       // m²/Hz
  Window window = Window::Hann;
  std::size_t segment_length = 0;   // samples
  double overlap = 0.5;             // fraction
  double sample_rate = 0.0;         // Hz

  double resolution() const { return sample_rate / static_cast<double>(segment_length); }
  // ∫ PSD df over [f_lo, f_hi] (rectangle rule over whole bins).
  double band_power(double f_lo, double f_hi) const;
  // Frequency of the largest value inside [f_lo, f_hi].
  double peak_frequency(double f_lo, double f_hi) const;
};

// Welch average of Hann-windowed periodograms, normalized so that the
// integral over frequency equals the mean square of each segment. Throws
// RangeError unless the trace holds at least two segments.
PsdEstimate welch_psd(std::span<const double> trace, double sample_rate,
                      std::size_t segment_length, double overlap = 0.5);

}  // namespace casimir3
