#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "casimir3/lifshitz.hpp"
#include "casimir3/material.hpp"

namespace casimir3 {

struct TableGrid {
  double min_separation = 50e-9;  // m
  double max_separation = 1e-6;   // m
  int points = 200;               // logarithmically spaced
};

// Sphere-plate force F_C(x, T) with its first two separation derivatives on
// a strictly increasing grid. Force > 0 is attraction (gradient < 0,
// curvature > 0). Values between nodes come from the piecewise quintic
// Hermite interpolant that matches force, gradient and curvature at every
// node; the derivative columns are computed from the analytic x-derivatives
// of the Lifshitz integrand, never by differencing the force column.
//
// Immutable once built; all member functions are safe for concurrent use.
class CasimirTable {
 public:
  static CasimirTable build(const MaterialModel& material, double sphere_radius,
                            double temperature, const TableGrid& grid = {}, int threads = 1);

  // Assemble from columns (CSV import, tests). Validates monotonicity.
  static CasimirTable from_columns(std::vector<double> separations, std::vector<double> force,
                                   std::vector<double> gradient, std::vector<double> curvature,
                                   double temperature,
                                   std::optional<MaterialModel> material = std::nullopt);

  // Header: separation_m,force_N,gradient_N_per_m,curvature_N_per_m2,temperature_K
  void write_csv(std::ostream& out) const;
  static CasimirTable read_csv(std::istream& in);

  // Interpolated force and derivatives anywhere in [min, max].
  // Throws RangeError outside the grid.
  ForceDerivatives evaluate(double x) const;
  double force(double x) const;

  bool contains(double x) const { return x >= separations_.front() && x <= separations_.back(); }
  double min_separation() const { return separations_.front(); }
  double max_separation() const { return separations_.back(); }

  std::span<const double> separations() const { return separations_; }
  std::span<const double> forces() const { return force_; }
  std::span<const double> gradients() const { return gradient_; }
  std::span<const double> curvatures() const { return curvature_; }
  double temperature() const { return temperature_; }
  const std::optional<MaterialModel>& material() const { return material_; }

 private:
  CasimirTable() = default;
  void build_coefficients();

  std::vector<double> separations_;
  std::vector<double> force_;
  std::vector<double> gradient_;
  std::vector<double> curvature_;
  double temperature_ = 0.0;
  std::optional<MaterialModel> material_;
  // Per-interval polynomial coefficients in the local variable t = x - x_i.
  std::vector<std::array<double, 6>> coefficients_;
};

// (dF/dx, d²F/dx²) of the table interpolant at x. Requires x to be at least
// one grid step away from either edge (RangeError otherwise).
struct GradientCurvature {
  double gradient;
  double curvature;
};
GradientCurvature force_derivatives(const CasimirTable& table, double x);

}  // namespace casimir3
