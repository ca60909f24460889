#pragma once

#include <cstddef>

#include "casimir3/material.hpp"

namespace casimir3 {

struct LifshitzOptions {
  // Relative tolerance of each k⊥ (and, at T = 0, ξ) quadrature.
  double quadrature_tolerance = 1e-10;
  // Matsubara truncation: stop once `consecutive` terms in a row are below
  // `sum_tolerance` times the running sum (every component).
  double sum_tolerance = 1e-10;
  int consecutive = 3;
  std::size_t max_terms = 5000;
};

// Plate-plate Lifshitz energy per unit area and its first two derivatives
// with respect to the separation: J/m², J/m³, J/m⁴.
struct EnergyDerivatives {
  double energy;
  double first;
  double second;
};

struct LifshitzDiagnostics {
  std::size_t matsubara_terms = 0;  // 0 for the T = 0 integral
  long evaluations = 0;
};

// Separation x must lie in [1 nm, 10 µm]; T >= 0 (T = 0 integrates over
// continuous ξ). Throws NumericalError if a quadrature or the Matsubara
// sum does not converge.
EnergyDerivatives lifshitz_energy_derivatives(const MaterialModel& material, double x,
                                              double temperature,
                                              const LifshitzOptions& options = {},
                                              LifshitzDiagnostics* diagnostics = nullptr);

double lifshitz_energy_per_area(const MaterialModel& material, double x, double temperature);

// Sphere-plate force and derivatives under the proximity-force approximation.
// Sign convention: force > 0 is attraction; gradient = dF/dx, curvature = d²F/dx².
struct ForceDerivatives {
  double force;
  double gradient;
  double curvature;
};

ForceDerivatives pfa_sphere_plate(const MaterialModel& material, double radius, double x,
                                  double temperature, const LifshitzOptions& options = {});

// F = -2πR E(x, T); throws PreconditionError when R/x < 10.
double pfa_sphere_plate_force(const MaterialModel& material, double radius, double x,
                              double temperature);

// Perfect-conductor, zero-temperature sphere-plate force π³ħcR/(360 x³)
// and its derivatives.
ForceDerivatives ideal_sphere_plate(double radius, double x);

// |F(x, 300 K) - F(x, 0)| / |F(x, 300 K)|; requires x <= 1 µm.
double thermal_fraction(const MaterialModel& material, double x,
                        double temperature = 300.0);

}  // namespace casimir3
