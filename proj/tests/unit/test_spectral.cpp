#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "casimir3/errors.hpp"
#include "casimir3/spectral.hpp"

using namespace casimir3;

TEST_CASE("sine power integrates to A^2/2") {
  const double fs = 1024.0, A = 3e-12;
  const std::size_t seg = 1024;
  const double f0 = 100.0;  // bin-centered
  std::vector<double> x(8 * seg);
  for (std::size_t n = 0; n < x.size(); ++n)
    x[n] = A * std::sin(2.0 * 3.14159265358979323846 * f0 * static_cast<double>(n) / fs);
  const auto p = welch_psd(x, fs, seg);
  CHECK(p.resolution() == 1.0);
  CHECK(p.frequencies.size() == seg / 2 + 1);
  CHECK(p.band_power(90.0, 110.0) == doctest::Approx(A * A / 2.0).epsilon(0.01));
  CHECK(p.peak_frequency(50.0, 150.0) == 100.0);
}

TEST_CASE("white noise level is 2 sigma^2 / fs") {
  const double fs = 2000.0, sigma = 1.5;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<double> x(1 << 18);
  for (double& v : x) v = n(rng);
  const auto p = welch_psd(x, fs, 2048);
  double mean = 0.0;
  for (std::size_t k = 1; k + 1 < p.values.size(); ++k) mean += p.values[k];
  mean /= static_cast<double>(p.values.size() - 2);
  CHECK(mean == doctest::Approx(2.0 * sigma * sigma / fs).epsilon(0.05));
}

TEST_CASE("zero signal gives zero psd") {
  const std::vector<double> x(4096, 0.0);
  for (double v : welch_psd(x, 100.0, 512).values) CHECK(v == 0.0);
}

TEST_CASE("mean square preserved across segments") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(1 << 16);
  for (double& v : x) v = n(rng);
  const auto p = welch_psd(x, 1.0, 4096);
  double total = 0.0;
  for (double v : p.values) total += v * p.resolution();
  CHECK(total == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("too short a trace") {
  const std::vector<double> x(1000, 1.0);
  CHECK_THROWS_AS(welch_psd(x, 100.0, 600), RangeError);
}
