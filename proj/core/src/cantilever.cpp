#include "casimir3/cantilever.hpp"

#include <cmath>
#include <string>

#include "casimir3/errors.hpp"

namespace casimir3 {

CantileverParams CantileverParams::from_stiffness(double k_spring, double omega, double gamma,
                                                  std::optional<double> sphere_radius) {
  CantileverParams p{k_spring / (omega * omega), omega, gamma, k_spring, sphere_radius};
  p.validate();
  return p;
}

CantileverParams CantileverParams::from_mass(double mass, double omega, double gamma,
                                             std::optional<double> sphere_radius) {
  CantileverParams p{mass, omega, gamma, mass * omega * omega, sphere_radius};
  p.validate();
  return p;
}

void CantileverParams::validate(const char* key) const {
  const std::string k(key);
  if (!(mass > 0.0 && std::isfinite(mass))) throw ConfigError("mass must be positive", k);
  if (!(omega > 0.0 && std::isfinite(omega))) throw ConfigError("frequency must be positive", k);
  if (!(k_spring > 0.0 && std::isfinite(k_spring)))
    throw ConfigError("stiffness must be positive", k);
  if (!std::isfinite(gamma)) throw ConfigError("damping must be finite", k);
  if (std::abs(k_spring - mass * omega * omega) > 1e-6 * k_spring)
    throw ConfigError("stiffness and mass*omega^2 disagree beyond 1e-6", k);
  if (sphere_radius && !(*sphere_radius > 0.0))
    throw ConfigError("sphere radius must be positive", k);
}

CantileverParams apply_gain(const CantileverParams& cant, double G) {
  if (!(G >= 0.0)) throw DomainError("gain G must be >= 0");
  CantileverParams out = cant;
  out.gamma = cant.gamma - G;
  return out;
}

double beam_stiffness(double youngs_modulus, double length, double width, double thickness) {
  return youngs_modulus * width * thickness * thickness * thickness /
         (4.0 * length * length * length);
}

}  // namespace casimir3
