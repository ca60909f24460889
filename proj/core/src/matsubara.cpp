#include "casimir3/matsubara.hpp"

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

double matsubara_spacing(double temperature) {
  if (!(temperature > 0.0)) throw DomainError("Matsubara spacing needs T > 0");
  return units::kTwoPi * kCodata2018.k_B * temperature / kCodata2018.hbar;
}

MatsubaraGrid::MatsubaraGrid(double temperature, std::size_t truncation_index)
    : temperature_(temperature),
      spacing_(matsubara_spacing(temperature)),
      truncation_index_(truncation_index) {}

std::vector<double> MatsubaraGrid::frequencies() const {
  std::vector<double> out(truncation_index_ + 1);
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = frequency(l);
  return out;
}

std::vector<double> MatsubaraGrid::weights() const {
  std::vector<double> out(truncation_index_ + 1);
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = weight(l);
  return out;
}

}  // namespace casimir3
