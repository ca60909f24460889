#include "casimir3/lifshitz.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"
#include "casimir3/matsubara.hpp"
#include "casimir3/quadrature.hpp"

namespace casimir3 {

namespace {

using quadrature::Vec;

// Integrand span beyond the lower limit: e^{-45} u³ stays below 1e-16 of
// the bulk of the integral for every power of u that appears.
constexpr double kTailSpan = 45.0;

void check_separation(double x) {
  if (!(x >= 1e-9 && x <= 1e-5))
    throw DomainError("separation must lie in [1 nm, 10 um]");
}

// Dimensionless u-integrals for one imaginary frequency, u = 2 x q:
//   [0] ∫ u Σ_p ln(1 - y_p) du
//   [1] ∫ u² Σ_p y_p / (1 - y_p) du
//   [2] ∫ u³ Σ_p y_p / (1 - y_p)² du
// with y_p = r_p² e^{-u}. The k⊥-integral equals [0] / (4x²); the x-
// derivatives bring down factors of -2q = -u/x per order.
struct UIntegrand {
  detail::Response response;
  double inv_2x;  // q = u / (2x)
  long* evaluations;

  Vec<3> operator()(double u) const {
    ++*evaluations;
    const double q = u * inv_2x;
    const auto r = detail::reflection_from_q(response, q);
    const double e = std::exp(-u);
    const double one_minus_e = -std::expm1(-u);
    Vec<3> out{0.0, 0.0, 0.0};
    for (const double rp : {r.te, r.tm}) {
      const double r2 = rp * rp;
      if (r2 == 0.0) continue;
      const double y = r2 * e;
      // Near r² = 1 the rearranged form keeps 1 - y accurate; elsewhere
      // log1p avoids a roundoff floor in the tail.
      const double one_minus_y =
          y < 0.5 ? 1.0 - y : (1.0 - rp) * (1.0 + rp) + r2 * one_minus_e;
      const double ratio = y / one_minus_y;
      out[0] += y < 0.5 ? std::log1p(-y) : std::log(one_minus_y);
      out[1] += ratio;
      out[2] += ratio / one_minus_y;
    }
    out[0] *= u;
    out[1] *= u * u;
    out[2] *= u * u * u;
    return out;
  }
};

Vec<3> u_integrals(const MaterialModel& material, double xi, double x, double zeta,
                   const LifshitzOptions& options, long* evaluations) {
  UIntegrand f{detail::response_at(material, xi), 0.5 / x, evaluations};
  const std::array<double, 7> breaks{zeta,       zeta + 0.5,  zeta + 2.0,      zeta + 5.0,
                                     zeta + 10., zeta + 20.0, zeta + kTailSpan};
  quadrature::Tolerance tol;
  tol.relative = options.quadrature_tolerance;
  tol.absolute = 1e-300;
  const auto res = quadrature::integrate<3>(f, std::span<const double>(breaks), tol);
  if (!res.converged) {
    std::ostringstream os;
    os.precision(12);
    os << "k-perp quadrature did not converge at xi = " << xi << " rad/s, x = " << x
       << " m; last estimates " << res.previous[0] << " -> " << res.value[0];
    throw NumericalError(os.str());
  }
  return res.value;
}

EnergyDerivatives assemble(const Vec<3>& sums, double prefactor, double x) {
  // E  = P Σ I0,  E' = P Σ I1 / x,  E'' = -P Σ I2 / x²
  return {prefactor * sums[0], prefactor * sums[1] / x, -prefactor * sums[2] / (x * x)};
}

EnergyDerivatives finite_temperature(const MaterialModel& material, double x, double T,
                                     const LifshitzOptions& options,
                                     LifshitzDiagnostics& diag) {
  constexpr double c = kCodata2018.c;
  const double spacing = matsubara_spacing(T);
  Vec<3> sum{0.0, 0.0, 0.0};
  Vec<3> previous_sum{0.0, 0.0, 0.0};
  int quiet = 0;
  std::size_t l = 0;
  for (; l < options.max_terms; ++l) {
    const double xi = spacing * static_cast<double>(l);
    const double zeta = 2.0 * x * xi / c;
    const double w = MatsubaraGrid::weight(l);
    const auto term = u_integrals(material, xi, x, zeta, options, &diag.evaluations);
    previous_sum = sum;
    bool small = l > 0;
    for (int k = 0; k < 3; ++k) {
      sum[k] += w * term[k];
      if (std::abs(w * term[k]) >= options.sum_tolerance * std::abs(sum[k])) small = false;
    }
    quiet = small ? quiet + 1 : 0;
    if (quiet >= options.consecutive) break;
  }
  if (l >= options.max_terms) {
    std::ostringstream os;
    os.precision(12);
    os << "Matsubara sum not converged after " << options.max_terms
       << " terms at x = " << x << " m; last partial sums " << previous_sum[0] << " -> "
       << sum[0];
    throw NumericalError(os.str());
  }
  diag.matsubara_terms = l + 1;
  const double prefactor = kCodata2018.k_B * T / units::kTwoPi / (4.0 * x * x);
  return assemble(sum, prefactor, x);
}

EnergyDerivatives zero_temperature(const MaterialModel& material, double x,
                                   const LifshitzOptions& options, LifshitzDiagnostics& diag) {
  constexpr double c = kCodata2018.c;
  // ξ = c ζ / (2x); the outer integrand is the u-integral at that ξ.
  auto outer = [&](double zeta) {
    return u_integrals(material, c * zeta / (2.0 * x), x, zeta, options, &diag.evaluations);
  };
  const std::array<double, 10> breaks{0.0, 0.01, 0.1, 0.5, 2.0, 5.0, 10.0, 20.0, 30.0, kTailSpan};
  quadrature::Tolerance tol;
  tol.relative = std::max(options.quadrature_tolerance * 10.0, 1e-11);
  tol.absolute = 1e-300;
  const auto res = quadrature::integrate<3>(outer, std::span<const double>(breaks), tol);
  if (!res.converged) {
    std::ostringstream os;
    os.precision(12);
    os << "frequency quadrature did not converge at x = " << x << " m; last estimates "
       << res.previous[0] << " -> " << res.value[0];
    throw NumericalError(os.str());
  }
  diag.matsubara_terms = 0;
  // ħ/(4π²) ∫dξ ∫k dk  ->  ħ/(4π²) (c/2x) (1/4x²) ∫dζ ∫u du
  const double prefactor =
      kCodata2018.hbar / (4.0 * units::kPi * units::kPi) * (c / (2.0 * x)) / (4.0 * x * x);
  return assemble(res.value, prefactor, x);
}

}  // namespace

EnergyDerivatives lifshitz_energy_derivatives(const MaterialModel& material, double x,
                                              double temperature,
                                              const LifshitzOptions& options,
                                              LifshitzDiagnostics* diagnostics) {
  check_separation(x);
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  LifshitzDiagnostics local;
  LifshitzDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = {};
  if (temperature == 0.0) return zero_temperature(material, x, options, diag);
  return finite_temperature(material, x, temperature, options, diag);
}

double lifshitz_energy_per_area(const MaterialModel& material, double x, double temperature) {
  return lifshitz_energy_derivatives(material, x, temperature).energy;
}

ForceDerivatives pfa_sphere_plate(const MaterialModel& material, double radius, double x,
                                  double temperature, const LifshitzOptions& options) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  check_separation(x);
  if (radius / x < 10.0)
    throw PreconditionError("proximity-force approximation needs R/x >= 10");
  const auto e = lifshitz_energy_derivatives(material, x, temperature, options);
  const double k = -units::kTwoPi * radius;
  return {k * e.energy, k * e.first, k * e.second};
}

double pfa_sphere_plate_force(const MaterialModel& material, double radius, double x,
                              double temperature) {
  return pfa_sphere_plate(material, radius, x, temperature).force;
}

ForceDerivatives ideal_sphere_plate(double radius, double x) {
  constexpr double pi = units::kPi;
  const double a = pi * pi * pi * kCodata2018.hbar * kCodata2018.c * radius / 360.0;
  const double x3 = x * x * x;
  return {a / x3, -3.0 * a / (x3 * x), 12.0 * a / (x3 * x * x)};
}

double thermal_fraction(const MaterialModel& material, double x, double temperature) {
  if (!(x <= 1e-6)) throw PreconditionError("thermal_fraction needs x <= 1 um");
  const double warm = lifshitz_energy_per_area(material, x, temperature);
  const double cold = lifshitz_energy_per_area(material, x, 0.0);
  return std::abs(warm - cold) / std::abs(warm);
}

}  // namespace casimir3
