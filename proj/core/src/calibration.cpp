#include "casimir3/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <string>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"
#include "casimir3/lifshitz.hpp"

namespace casimir3 {

double gradient_from_shift(const FrequencyShiftRecord& record) {
  if (!(record.omega_0 > 0.0) || !(record.k_spring > 0.0))
    throw DomainError("omega_0 and k_spring must be positive");
  if (std::abs(record.delta_omega / record.omega_0) >= 0.1)
    throw PreconditionError("|delta_omega / omega_0| >= 0.1: linearized shift formula invalid");
  return -2.0 * record.k_spring * record.delta_omega / record.omega_0;
}

double predicted_shift(const ElectrostaticSetup& setup, double casimir_gradient,
                       double omega_0, double k_spring) {
  if (!(setup.x > 0.0) || !(setup.R > 0.0) || !(setup.V_rms >= 0.0))
    throw DomainError("electrostatic setup needs x > 0, R > 0, V_rms >= 0");
  const double pre = omega_0 / (2.0 * k_spring);
  const double dv = setup.V_ext - setup.V_c;
  const double electrostatic = units::kPi * kCodata2018.epsilon_0 * setup.R /
                               (setup.x * setup.x) * (dv * dv + setup.V_rms * setup.V_rms);
  return -pre * electrostatic - pre * casimir_gradient;
}

CalibrationResult calibrate_separation(std::span<const FrequencyShiftRecord> records,
                                       double sphere_radius) {
  if (!(sphere_radius > 0.0)) throw DomainError("sphere radius must be positive");
  std::set<double> distinct;
  for (const auto& r : records) distinct.insert(r.V_ext);
  if (distinct.size() < 5)
    throw FitError("calibration needs at least 5 distinct voltages, got " +
                   std::to_string(distinct.size()));
  const double omega_0 = records.front().omega_0;
  const double k = records.front().k_spring;
  for (const auto& r : records)
    if (std::abs(r.omega_0 - omega_0) > 1e-12 * omega_0 || std::abs(r.k_spring - k) > 1e-12 * k)
      throw FitError("records disagree on omega_0 or k_spring");

  // Centre and scale the voltages so the normal equations stay well conditioned.
  const auto n = static_cast<Eigen::Index>(records.size());
  double mean = 0.0;
  for (const auto& r : records) mean += r.V_ext;
  mean /= static_cast<double>(n);
  double scale = 0.0;
  for (const auto& r : records) scale = std::max(scale, std::abs(r.V_ext - mean));
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (records[static_cast<std::size_t>(i)].V_ext - mean) / scale;
    A(i, 0) = u * u;
    A(i, 1) = u;
    A(i, 2) = 1.0;
    b(i) = records[static_cast<std::size_t>(i)].delta_omega;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3) throw FitError("degenerate calibration design matrix");
  const Eigen::Vector3d c = qr.solve(b);
  const double residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));

  // Back to V_ext: β2 V² + β1 V + β0.
  const double beta2 = c(0) / (scale * scale);
  const double beta1 = c(1) / scale - 2.0 * beta2 * mean;
  const double beta0 = c(2) - c(1) * mean / scale + beta2 * mean * mean;
  if (!(beta2 < 0.0))
    throw FitError("fitted curvature has the wrong sign; recovered x^2 would be negative");
  const double V_c = -beta1 / (2.0 * beta2);
  if (V_c <= *distinct.begin() || V_c >= *distinct.rbegin())
    throw FitError("voltage sweep does not bracket the fitted patch potential");
  const double pre = omega_0 / (2.0 * k);
  const double x2 = -pre * units::kPi * kCodata2018.epsilon_0 * sphere_radius / beta2;
  const double vertex = beta0 - beta1 * beta1 / (4.0 * beta2);
  return {std::sqrt(x2), V_c, -vertex / pre, residual};
}

std::vector<double> integrate_gradient(std::span<const double> separations,
                                       std::span<const double> gradients, double anchor_force) {
  const auto n = separations.size();
  if (n < 3) throw DomainError("integrate_gradient needs at least 3 points");
  if (gradients.size() != n) throw DomainError("separations and gradients differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(separations[i] > separations[i - 1]))
      throw DomainError("separations must be strictly increasing");
  std::vector<double> force(n);
  force[n - 1] = anchor_force;
  for (std::size_t i = n - 1; i-- > 0;)
    force[i] = force[i + 1] - 0.5 * (gradients[i] + gradients[i + 1]) *
                                  (separations[i + 1] - separations[i]);
  return force;
}

std::vector<double> integrate_gradient(std::span<const double> separations,
                                       std::span<const double> gradients,
                                       const MaterialModel& material, double sphere_radius,
                                       double temperature) {
  if (separations.empty()) throw DomainError("integrate_gradient needs at least 3 points");
  const double anchor =
      pfa_sphere_plate_force(material, sphere_radius, separations.back(), temperature);
  return integrate_gradient(separations, gradients, anchor);
}

std::vector<FrequencyShiftRecord> read_shift_records(std::istream& in, double omega_0,
                                                     double k_spring) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty calibration record file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "V_ext_V,delta_omega_rad_s")
    throw ConfigError("calibration records need header 'V_ext_V,delta_omega_rad_s'");
  std::vector<FrequencyShiftRecord> out;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream is(line);
    double v = 0.0, dw = 0.0;
    char comma = 0;
    if (!(is >> v >> comma >> dw) || comma != ',')
      throw ConfigError("malformed calibration row " + std::to_string(row));
    out.push_back({v, dw, omega_0, k_spring});
  }
  return out;
}

}  // namespace casimir3
