#include "casimir3/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

}  // namespace

double PsdEstimate::band_power(double f_lo, double f_hi) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < frequencies.size(); ++k)
    if (frequencies[k] >= f_lo && frequencies[k] <= f_hi) sum += values[k];
  return sum * resolution();
}

double PsdEstimate::peak_frequency(double f_lo, double f_hi) const {
  double best = -1.0, where = f_lo;
  for (std::size_t k = 0; k < frequencies.size(); ++k)
    if (frequencies[k] >= f_lo && frequencies[k] <= f_hi && values[k] > best) {
      best = values[k];
      where = frequencies[k];
    }
  return where;
}

PsdEstimate welch_psd(std::span<const double> trace, double sample_rate,
                      std::size_t segment_length, double overlap) {
  if (segment_length < 2) throw RangeError("segment length must be >= 2");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw RangeError("overlap must lie in [0, 1)");
  if (!(sample_rate > 0.0)) throw RangeError("sample rate must be positive");
  if (trace.size() < 2 * segment_length)
    throw RangeError("trace of " + std::to_string(trace.size()) +
                     " samples is shorter than two segments of " +
                     std::to_string(segment_length));

  const std::size_t n = segment_length;
  const std::size_t bins = n / 2 + 1;
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * (1.0 - overlap))));

  std::vector<double> window(n);
  double window_power = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Periodic Hann.
    window[i] = 0.5 - 0.5 * std::cos(units::kTwoPi * static_cast<double>(i) /
                                     static_cast<double>(n));
    window_power += window[i] * window[i];
  }

  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  if (!plan.plan) throw NumericalError("FFTW planning failed");

  PsdEstimate psd;
  psd.segment_length = n;
  psd.overlap = overlap;
  psd.sample_rate = sample_rate;
  psd.frequencies.resize(bins);
  psd.values.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k)
    psd.frequencies[k] = static_cast<double>(k) * sample_rate / static_cast<double>(n);

  std::size_t segments = 0;
  for (std::size_t start = 0; start + n <= trace.size(); start += hop) {
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = trace[start + i] * window[i];
    fftw_execute(plan.plan);
    for (std::size_t k = 0; k < bins; ++k) {
      const double re = out.get()[k][0], im = out.get()[k][1];
      psd.values[k] += re * re + im * im;
    }
    ++segments;
  }
  const double scale = 1.0 / (sample_rate * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (n % 2 == 0 && k == bins - 1);
    psd.values[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return psd;
}

}  // namespace casimir3
