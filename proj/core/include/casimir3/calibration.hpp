#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "casimir3/material.hpp"

namespace casimir3 {

struct ElectrostaticSetup {
  double V_ext = 0.0;  // V
  double V_c = 0.0;    // V, patch potential
  double V_rms = 0.0;  // V
  double R = 35e-6;    // m
  double x = 100e-9;   // m
};

struct FrequencyShiftRecord {
  double V_ext = 0.0;        // V
  double delta_omega = 0.0;  // rad/s
  double omega_0 = 1.0;      // rad/s
  double k_spring = 1.0;     // N/m
};

// dF/dx = -2k δω/ω. Throws PreconditionError when |δω/ω| >= 0.1.
double gradient_from_shift(const FrequencyShiftRecord& record);

// Δω = -(ω/2k)(πε0R/x²)[(V_ext - V_c)² + V_rms²] - (ω/2k) dF_C/dx
double predicted_shift(const ElectrostaticSetup& setup, double casimir_gradient,
                       double omega_0, double k_spring);

struct CalibrationResult {
  double separation;        // m
  double patch_potential;   // V
  double casimir_gradient;  // N/m, assumes V_rms = 0
  double residual;          // rad/s, rms of the fit residuals
};

// Least-squares parabola through (V_ext, δω); needs at least five distinct
// voltages on both sides of the vertex. All records must share ω0 and k.
// Throws FitError on degenerate or inconsistent data.
CalibrationResult calibrate_separation(std::span<const FrequencyShiftRecord> records,
                                       double sphere_radius);

// Cumulative trapezoidal integral of dF/dx from the far end inward,
// F(x_i) = F(x_n) - ∫_{x_i}^{x_n} dF/dx. Throws DomainError unless the
// separations are strictly increasing (>= 3 points).
std::vector<double> integrate_gradient(std::span<const double> separations,
                                       std::span<const double> gradients, double anchor_force);

// Same, anchored to the proximity-force Lifshitz force at the largest separation.
std::vector<double> integrate_gradient(std::span<const double> separations,
                                       std::span<const double> gradients,
                                       const MaterialModel& material, double sphere_radius,
                                       double temperature);

// Calibration CSV: header V_ext_V,delta_omega_rad_s. ω0 and k are supplied
// by the caller since the file carries only the sweep.
std::vector<FrequencyShiftRecord> read_shift_records(std::istream& in, double omega_0,
                                                     double k_spring);

}  // namespace casimir3
