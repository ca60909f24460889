#pragma once

#include <cstddef>
#include <vector>

namespace casimir3 {

// Spacing 2π k_B T / ħ of the Matsubara frequencies at temperature T (K).
double matsubara_spacing(double temperature);

// ξ_l = l · 2π k_B T / ħ for l = 0..truncation_index, with the primed-sum
// weights (1/2 for l = 0, 1 otherwise).
class MatsubaraGrid {
 public:
  MatsubaraGrid(double temperature, std::size_t truncation_index);

  double temperature() const { return temperature_; }
  double spacing() const { return spacing_; }
  std::size_t truncation_index() const { return truncation_index_; }

  double frequency(std::size_t l) const { return spacing_ * static_cast<double>(l); }
  static double weight(std::size_t l) { return l == 0 ? 0.5 : 1.0; }

  std::vector<double> frequencies() const;
  std::vector<double> weights() const;

 private:
  double temperature_;
  double spacing_;
  std::size_t truncation_index_;
};

}  // namespace casimir3
