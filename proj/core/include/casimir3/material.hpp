#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace casimir3 {

struct IdealConductor {};

// ε(iξ) = 1 + ω_p² / (ξ (ξ + γ_D))
struct Drude {
  double plasma_frequency;  // rad/s
  double relaxation_rate;   // rad/s
};

// ε(iξ) = 1 + ω_p² / ξ²  (Drude with γ_D → 0)
struct Plasma {
  double plasma_frequency;  // rad/s
};

// Sampled ε(iξ), interpolated log-log and clamped to the end values.
class TabulatedPermittivity {
 public:
  // Points must be sorted by strictly increasing ξ > 0 with ε ≥ 1 and
  // non-increasing in ξ. Throws ConfigError otherwise (or when empty).
  explicit TabulatedPermittivity(std::vector<std::pair<double, double>> points);

  // Two whitespace-separated columns (ξ in rad/s, ε), '#' comments.
  static TabulatedPermittivity read(std::istream& in);
  static TabulatedPermittivity load(const std::filesystem::path& path);

  double operator()(double xi) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

class MaterialModel {
 public:
  using Kind = std::variant<IdealConductor, Drude, Plasma, TabulatedPermittivity>;

  MaterialModel() : kind_(IdealConductor{}) {}
  explicit MaterialModel(Kind kind);

  static MaterialModel ideal() { return MaterialModel(IdealConductor{}); }
  static MaterialModel drude(double plasma_frequency, double relaxation_rate);
  static MaterialModel plasma(double plasma_frequency);
  static MaterialModel tabulated(TabulatedPermittivity table);

  // Gold defaults: ω_p = 9.0 eV, γ_D = 0.035 eV.
  static MaterialModel gold_drude();
  static MaterialModel gold_plasma();

  const Kind& kind() const { return kind_; }
  bool is_ideal() const { return std::holds_alternative<IdealConductor>(kind_); }
  std::string describe() const;

 private:
  Kind kind_;
};

// ε(iξ). `infinite` is set for the ideal conductor at every ξ and for the
// Drude/plasma models at ξ = 0, where `value` is meaningless.
struct Permittivity {
  double value;
  bool infinite;
};

Permittivity permittivity_at(const MaterialModel& material, double xi);

struct ReflectionCoefficients {
  double te;
  double tm;
};

// Fresnel coefficients of a half-space at imaginary frequency iξ and
// in-plane wave number k⊥ (1/m).
ReflectionCoefficients reflection_coefficients(const MaterialModel& material, double xi,
                                               double k_perp);

namespace detail {

// Material response at fixed ξ in the form the Lifshitz integrand needs:
// k_mat² = q² + excess_k2 with excess_k2 = (ε - 1) ξ² / c², which stays
// finite at ξ = 0 for Drude and plasma.
struct Response {
  double eps;
  double excess_k2;
  bool ideal;
  bool eps_infinite;
};

Response response_at(const MaterialModel& material, double xi);

// Reflection coefficients from the vacuum decay constant q = sqrt(k⊥² + ξ²/c²).
inline ReflectionCoefficients reflection_from_q(const Response& r, double q);

}  // namespace detail

}  // namespace casimir3

#include "casimir3/detail/material_inl.hpp"
