#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <optional>

#include "casimir3/cantilever.hpp"
#include "casimir3/casimir_table.hpp"
#include "casimir3/geometry.hpp"
#include "casimir3/system_config.hpp"

namespace casimir3 {

using Cantilevers = std::array<CantileverParams, 3>;
using Eigenvalues = std::array<std::complex<double>, 3>;

// Interaction-picture Hamiltonian of the three parametrically coupled modes:
//
//   H = [ -iγ1/2    g12/2          0        ]
//       [ g12/2    -iγ2/2 - δ2     g23/2    ]
//       [ 0         g23/2         -iγ3/2 - δ3 ]
//
// omega/mass/gamma are the per-mode values the entries were built from:
// bare cantilever values, or Casimir-dressed normal-mode values when built
// with effective frequencies.
struct ReducedModel {
  Eigen::Matrix3cd H = Eigen::Matrix3cd::Zero();
  double g12 = 0.0;      // rad/s
  double g23 = 0.0;      // rad/s
  double delta2 = 0.0;   // rad/s
  double delta3 = 0.0;   // rad/s
  double Lambda1 = 0.0;  // N/m
  double Lambda2 = 0.0;  // N/m
  std::array<double, 3> omega{};
  std::array<double, 3> mass{};
  std::array<double, 3> gamma{};
};

// Assemble H directly from rates (all rad/s).
ReducedModel make_reduced_model(const std::array<double, 3>& gamma, double g12, double g23,
                                double delta2, double delta3);

// Λ1 = F''(d1) δd1, Λ2 = F''(d2) δd2 from the table curvatures at the
// equilibrium gaps, g12 = Λ1 / (2√(m1m2ω1ω2)), g23 = Λ2 / (2√(m2m3ω2ω3)).
//
// With use_effective_frequencies the modes are the normal modes of the
// Casimir-stiffened problem (K + Σ F'_p w_p w_pᵀ, M) and mode masses,
// frequencies and dampings come from those eigenvectors. Λ1, Λ2 are modal
// projections of the modulated stiffness, with the gap excursions including
// the cantilevers' forced response to the modulation.
//
// nonlinear = true averages over the two-tone gap modulation exactly: the
// gradients are the time-averaged F'_p at the self-consistently shifted
// mean gaps (the rectified force moves the equilibrium) and Λ is the
// Fourier component of F'_p(t) at each tone. nonlinear = false keeps the
// terms linear in the excursion (static gradients, Λ = F'' e).
ReducedModel build_reduced_model(const Cantilevers& cants, const Geometry& geom,
                                 const ModulationSettings& mods, const CasimirTable& table1,
                                 const CasimirTable& table2, bool use_effective_frequencies,
                                 bool nonlinear = true);

// Mode frequencies of the effective-frequency model above; they depend on
// the modulation frequencies only through the small forced response.
std::array<double, 3> modulated_mode_frequencies(const Cantilevers& cants, const Geometry& geom,
                                                 const ModulationSettings& mods,
                                                 const CasimirTable& table1,
                                                 const CasimirTable& table2,
                                                 bool nonlinear = true);

// Normal modes of the static Casimir-stiffened system. shape[a] is scaled so
// its own component is 1.
struct DressedModes {
  std::array<double, 3> omega{};
  std::array<double, 3> mass{};
  std::array<double, 3> gamma{};
  std::array<Eigen::Vector3d, 3> shape;
};
DressedModes dressed_modes(const Cantilevers& cants, double gradient1, double gradient2);

// Sorted by real part, ties by imaginary part.
Eigenvalues eigenvalues(const ReducedModel& model);
Eigenvalues eigenvalues(const Eigen::Matrix3cd& H);

// |Λ1Λ2 / (4 m2 m3 ω2 ω3 γ2 γ3 + Λ2²)| with the model's per-mode values.
// Throws PreconditionError unless |δ2|, |δ3| <= 1e-6 ω2.
double transduction_ratio(const ReducedModel& model);

// Closed-form eigenvalues for g12 = g23 = g, γ1 = γ3, δ2 = δ3 = 0.
Eigenvalues symmetric_eigenvalues(double gamma1, double gamma2, double g);

enum class Stability { Stable, Unstable, Marginal };
const char* to_string(Stability s);

// Closed-form steady-state conditions for the symmetric case:
// strong coupling (|g| > |γ1-γ2|/(2√2)): γ1 + γ2 > 0,
// weak coupling: γ1 + γ2 - √((γ1-γ2)² - 8g²) > 0.
Stability symmetric_stability(double gamma1, double gamma2, double g);

struct StabilityReport {
  Stability status = Stability::Stable;
  double margin = 0.0;  // -max Im λ, rad/s
  // Present when the model is in the symmetric special case.
  std::optional<Stability> closed_form;
};

// Eigenvalue criterion: stable iff every Im λ < 0. |margin| below 1e-12 of
// the largest rate counts as marginal.
StabilityReport stability_check(const ReducedModel& model);

}  // namespace casimir3
