#pragma once

#include <optional>

namespace casimir3 {

// One mechanical oscillator. k_spring and mass*omega² agree to 1e-6.
struct CantileverParams {
  double mass = 0.0;       // kg
  double omega = 0.0;      // rad/s
  double gamma = 0.0;      // rad/s, negative once gain exceeds the natural damping
  double k_spring = 0.0;   // N/m
  std::optional<double> sphere_radius;  // m

  static CantileverParams from_stiffness(double k_spring, double omega, double gamma,
                                         std::optional<double> sphere_radius = std::nullopt);
  static CantileverParams from_mass(double mass, double omega, double gamma,
                                    std::optional<double> sphere_radius = std::nullopt);

  // Throws ConfigError (with `key` as path) when an invariant fails.
  void validate(const char* key = "cantilever") const;
};

// Velocity feedback gain on the center cantilever: gamma -> gamma - G.
// Throws DomainError for G < 0.
CantileverParams apply_gain(const CantileverParams& cant, double G);

// Rectangular Euler-Bernoulli cantilever, end load: k = E w t³ / (4 L³).
double beam_stiffness(double youngs_modulus, double length, double width, double thickness);

}  // namespace casimir3
