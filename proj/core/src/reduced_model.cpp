#include "casimir3/reduced_model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "casimir3/errors.hpp"

namespace casimir3 {

namespace {

using cd = std::complex<double>;

const Eigen::Vector3d kW1(1.0, -1.0, 0.0);  // ∂d1/∂x
const Eigen::Vector3d kW2(0.0, 1.0, -1.0);  // ∂d2/∂x

double coupling(double lambda, double m_a, double m_b, double w_a, double w_b) {
  return lambda / (2.0 * std::sqrt(m_a * m_b * w_a * w_b));
}

void check_inputs(const Cantilevers& cants, const Geometry& geom, const ModulationSettings& mods,
                  const CasimirTable& table1, const CasimirTable& table2) {
  for (const auto& c : cants) c.validate();
  geom.validate();
  if (!table1.contains(geom.d1))
    throw RangeError("d1 = " + std::to_string(geom.d1 * 1e9) + " nm outside the Casimir table");
  if (!table2.contains(geom.d2))
    throw RangeError("d2 = " + std::to_string(geom.d2 * 1e9) + " nm outside the Casimir table");
  const double half_gap = 0.5 * std::min(geom.d1, geom.d2);
  if (mods.delta_d1 < 0.0 || mods.delta_d2 < 0.0)
    throw PreconditionError("modulation amplitudes must be >= 0");
  if (mods.delta_d1 >= half_gap || mods.delta_d2 >= half_gap)
    throw PreconditionError("modulation amplitude must stay below half the smaller gap");
}

}  // namespace

ReducedModel make_reduced_model(const std::array<double, 3>& gamma, double g12, double g23,
                                double delta2, double delta3) {
  ReducedModel m;
  m.g12 = g12;
  m.g23 = g23;
  m.delta2 = delta2;
  m.delta3 = delta3;
  m.gamma = gamma;
  const cd i(0.0, 1.0);
  m.H(0, 0) = -i * gamma[0] / 2.0;
  m.H(1, 1) = -i * gamma[1] / 2.0 - delta2;
  m.H(2, 2) = -i * gamma[2] / 2.0 - delta3;
  m.H(0, 1) = m.H(1, 0) = g12 / 2.0;
  m.H(1, 2) = m.H(2, 1) = g23 / 2.0;
  return m;
}

DressedModes dressed_modes(const Cantilevers& cants, double gradient1, double gradient2) {
  Eigen::Vector3d mass, sqrt_mass;
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    mass(i) = cants[static_cast<std::size_t>(i)].mass;
    sqrt_mass(i) = std::sqrt(mass(i));
    K(i, i) = cants[static_cast<std::size_t>(i)].k_spring;
  }
  K += gradient1 * kW1 * kW1.transpose() + gradient2 * kW2 * kW2.transpose();
  // Symmetric form M^{-1/2} K M^{-1/2}.
  const Eigen::Matrix3d S = sqrt_mass.cwiseInverse().asDiagonal() * K *
                            sqrt_mass.cwiseInverse().asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(S);
  if (solver.info() != Eigen::Success) throw NumericalError("static mode solve failed");
  if (solver.eigenvalues().minCoeff() <= 0.0)
    throw PreconditionError("Casimir gradient exceeds the spring stiffness (pull-in)");

  // Assign eigenvectors to cantilevers by the permutation with the largest
  // product of squared own components.
  std::array<int, 3> perm{0, 1, 2}, best = perm;
  double best_score = -1.0;
  do {
    double score = 1.0;
    for (int a = 0; a < 3; ++a) {
      const double v = solver.eigenvectors()(a, perm[static_cast<std::size_t>(a)]);
      score *= v * v;
    }
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  DressedModes out;
  for (int a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const int col = best[ua];
    Eigen::Vector3d phi = sqrt_mass.cwiseInverse().cwiseProduct(solver.eigenvectors().col(col));
    phi /= phi(a);
    double modal_mass = 0.0, modal_damping = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      modal_mass += mass(i) * phi(i) * phi(i);
      modal_damping += mass(i) * cants[ui].gamma * phi(i) * phi(i);
    }
    out.shape[ua] = phi;
    out.mass[ua] = modal_mass;
    out.omega[ua] = std::sqrt(solver.eigenvalues()(col));
    out.gamma[ua] = modal_damping / modal_mass;
  }
  return out;
}

namespace {

// Phase samples per modulation tone for the time averages.
constexpr int kPhaseGrid = 32;

// Effective-frequency description of one operating point.
struct ModulatedSystem {
  std::array<double, 2> gradient{};              // time-averaged F'_p
  std::array<std::array<cd, 2>, 2> stiffness{};  // [gap][tone] phasor of F'_p(t)
  DressedModes modes;
};

// Complex gap excursions [gap][tone] for the tones (ωmod1, δd1) and
// (ωmod2, δd2), including the cantilevers' forced response to each tone.
std::array<std::array<cd, 2>, 2> gap_excursions(const Cantilevers& cants,
                                                const std::array<double, 2>& gradient,
                                                const ModulationSettings& mods) {
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) K(i, i) = cants[static_cast<std::size_t>(i)].k_spring;
  K += gradient[0] * kW1 * kW1.transpose() + gradient[1] * kW2 * kW2.transpose();
  const Eigen::Vector3d drive(gradient[0], -gradient[0] - gradient[1], gradient[1]);
  const std::array<std::pair<double, double>, 2> tones{
      {{mods.omega_mod1, mods.delta_d1}, {mods.omega_mod2, mods.delta_d2}}};
  std::array<std::array<cd, 2>, 2> e{};
  for (std::size_t t = 0; t < 2; ++t) {
    const auto [w, delta] = tones[t];
    Eigen::Matrix3cd A = K.cast<cd>();
    for (int i = 0; i < 3; ++i) {
      const auto& c = cants[static_cast<std::size_t>(i)];
      A(i, i) += cd(-w * w * c.mass, w * c.mass * c.gamma);
    }
    const Eigen::Vector3cd X = A.partialPivLu().solve((delta * drive).cast<cd>());
    e[0][t] = -delta + kW1.cast<cd>().dot(X);
    e[1][t] = delta + kW2.cast<cd>().dot(X);
  }
  return e;
}

ModulatedSystem modulated_system(const Cantilevers& cants, const Geometry& geom,
                                 const ModulationSettings& mods, const CasimirTable& table1,
                                 const CasimirTable& table2, bool nonlinear) {
  const std::array<const CasimirTable*, 2> tables{&table1, &table2};
  const std::array<double, 2> d0{geom.d1, geom.d2};
  const std::array<ForceDerivatives, 2> f{table1.evaluate(d0[0]), table2.evaluate(d0[1])};
  ModulatedSystem m;
  m.gradient = {f[0].gradient, f[1].gradient};
  auto e = gap_excursions(cants, m.gradient, mods);

  if (!nonlinear) {
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t t = 0; t < 2; ++t) m.stiffness[p][t] = f[p].curvature * e[p][t];
  } else {
    // Exact averages over both modulation phases. The rectified mean force
    // shifts the equilibrium, so the gaps are iterated to self-consistency.
    std::array<cd, kPhaseGrid> phase;
    for (int k = 0; k < kPhaseGrid; ++k)
      phase[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / kPhaseGrid);
    const double norm = 1.0 / (kPhaseGrid * kPhaseGrid);
    std::array<double, 2> shift{};
    for (int pass = 0; pass < 100; ++pass) {
      std::array<double, 2> mean_force{};
      for (std::size_t p = 0; p < 2; ++p) {
        double force = 0.0, gradient = 0.0;
        cd c0 = 0.0, c1 = 0.0;
        for (const cd& za : phase)
          for (const cd& zb : phase) {
            const double x = d0[p] + shift[p] + (e[p][0] * za).real() + (e[p][1] * zb).real();
            const auto v = tables[p]->evaluate(x);
            force += v.force;
            gradient += v.gradient;
            c0 += v.gradient * std::conj(za);
            c1 += v.gradient * std::conj(zb);
          }
        mean_force[p] = force * norm;
        m.gradient[p] = gradient * norm;
        // An absent tone couples nothing; keep it exactly zero.
        m.stiffness[p] = {e[p][0] == 0.0 ? cd(0.0) : 2.0 * norm * c0,
                          e[p][1] == 0.0 ? cd(0.0) : 2.0 * norm * c1};
      }
      Eigen::Vector3d x = -(mean_force[0] - f[0].force) * kW1 - (mean_force[1] - f[1].force) * kW2;
      for (int i = 0; i < 3; ++i) x(i) /= cants[static_cast<std::size_t>(i)].k_spring;
      const std::array<double, 2> next{kW1.dot(x), kW2.dot(x)};
      const double change = std::max(std::abs(next[0] - shift[0]), std::abs(next[1] - shift[1]));
      shift = next;
      e = gap_excursions(cants, m.gradient, mods);
      if (change <= 1e-16) break;
    }
  }
  m.modes = dressed_modes(cants, m.gradient[0], m.gradient[1]);
  return m;
}

}  // namespace

std::array<double, 3> modulated_mode_frequencies(const Cantilevers& cants, const Geometry& geom,
                                                 const ModulationSettings& mods,
                                                 const CasimirTable& table1,
                                                 const CasimirTable& table2, bool nonlinear) {
  check_inputs(cants, geom, mods, table1, table2);
  return modulated_system(cants, geom, mods, table1, table2, nonlinear).modes.omega;
}

ReducedModel build_reduced_model(const Cantilevers& cants, const Geometry& geom,
                                 const ModulationSettings& mods, const CasimirTable& table1,
                                 const CasimirTable& table2, bool use_effective_frequencies,
                                 bool nonlinear) {
  check_inputs(cants, geom, mods, table1, table2);

  std::array<double, 3> omega{}, mass{}, gamma{};
  double lambda1 = 0.0, lambda2 = 0.0;
  if (!use_effective_frequencies) {
    for (std::size_t i = 0; i < 3; ++i) {
      omega[i] = cants[i].omega;
      mass[i] = cants[i].mass;
      gamma[i] = cants[i].gamma;
    }
    lambda1 = table1.evaluate(geom.d1).curvature * mods.delta_d1;
    lambda2 = table2.evaluate(geom.d2).curvature * mods.delta_d2;
  } else {
    const ModulatedSystem m = modulated_system(cants, geom, mods, table1, table2, nonlinear);
    omega = m.modes.omega;
    mass = m.modes.mass;
    gamma = m.modes.gamma;
    auto tone_coupling = [&](std::size_t t, int a, int b) {
      const auto& pa = m.modes.shape[static_cast<std::size_t>(a)];
      const auto& pb = m.modes.shape[static_cast<std::size_t>(b)];
      return m.stiffness[0][t] * pa.dot(kW1) * pb.dot(kW1) +
             m.stiffness[1][t] * pa.dot(kW2) * pb.dot(kW2);
    };
    lambda1 = std::abs(tone_coupling(0, 0, 1));
    lambda2 = std::abs(tone_coupling(1, 1, 2));
  }

  const double g12 = coupling(lambda1, mass[0], mass[1], omega[0], omega[1]);
  const double g23 = coupling(lambda2, mass[1], mass[2], omega[1], omega[2]);
  const double delta2 = omega[0] + mods.omega_mod1 - omega[1];
  const double delta3 = omega[0] + mods.omega_mod1 - mods.omega_mod2 - omega[2];
  ReducedModel model = make_reduced_model(gamma, g12, g23, delta2, delta3);
  model.Lambda1 = lambda1;
  model.Lambda2 = lambda2;
  model.omega = omega;
  model.mass = mass;
  return model;
}

Eigenvalues eigenvalues(const Eigen::Matrix3cd& H) {
  const Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(H, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solve failed");
  Eigenvalues ev{solver.eigenvalues()(0), solver.eigenvalues()(1), solver.eigenvalues()(2)};
  double scale = 0.0;
  for (const auto& l : ev) scale = std::max(scale, std::abs(l));
  const double tie = 1e-9 * scale;
  auto before = [tie](const cd& a, const cd& b) {
    if (std::abs(a.real() - b.real()) > tie) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  for (std::size_t i = 1; i < ev.size(); ++i)
    for (std::size_t j = i; j > 0 && before(ev[j], ev[j - 1]); --j) std::swap(ev[j], ev[j - 1]);
  return ev;
}

Eigenvalues eigenvalues(const ReducedModel& model) { return eigenvalues(model.H); }

double transduction_ratio(const ReducedModel& model) {
  const double tol = 1e-6 * model.omega[1];
  if (std::abs(model.delta2) > tol || std::abs(model.delta3) > tol)
    throw PreconditionError(
        "transduction_ratio is the on-resonance steady state; off resonance simulate the "
        "dynamics instead");
  const double l1 = model.Lambda1, l2 = model.Lambda2;
  const double denom = 4.0 * model.mass[1] * model.mass[2] * model.omega[1] * model.omega[2] *
                           model.gamma[1] * model.gamma[2] +
                       l2 * l2;
  return std::abs(l1 * l2 / denom);
}

Eigenvalues symmetric_eigenvalues(double gamma1, double gamma2, double g) {
  const cd i(0.0, 1.0);
  const cd root = std::sqrt(cd(8.0 * g * g - (gamma1 - gamma2) * (gamma1 - gamma2), 0.0));
  Eigen::Matrix3cd D = Eigen::Matrix3cd::Zero();
  D(0, 0) = -i * gamma1 / 2.0;
  D(1, 1) = -i * (gamma1 + gamma2) / 4.0 + root / 4.0;
  D(2, 2) = -i * (gamma1 + gamma2) / 4.0 - root / 4.0;
  return eigenvalues(D);
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "unknown";
}

Stability symmetric_stability(double gamma1, double gamma2, double g) {
  const double diff = gamma1 - gamma2;
  const double scale = std::max({std::abs(gamma1), std::abs(gamma2), std::abs(g)});
  const double eps = 1e-12 * scale;
  double lhs = 0.0;
  if (std::abs(g) > std::abs(diff) / (2.0 * std::sqrt(2.0)))
    lhs = gamma1 + gamma2;
  else
    lhs = gamma1 + gamma2 - std::sqrt(diff * diff - 8.0 * g * g);
  // λ1 = -iγ1/2 must decay as well.
  const double worst = std::min(lhs, gamma1);
  if (std::abs(worst) <= eps) return Stability::Marginal;
  return worst > 0.0 ? Stability::Stable : Stability::Unstable;
}

StabilityReport stability_check(const ReducedModel& model) {
  const auto ev = eigenvalues(model);
  double max_im = -std::numeric_limits<double>::infinity();
  for (const auto& l : ev) max_im = std::max(max_im, l.imag());
  double scale = std::max(std::abs(model.g12), std::abs(model.g23));
  for (double g : model.gamma) scale = std::max(scale, std::abs(g));
  StabilityReport report;
  report.margin = -max_im;
  if (std::abs(report.margin) <= 1e-12 * scale)
    report.status = Stability::Marginal;
  else
    report.status = report.margin > 0.0 ? Stability::Stable : Stability::Unstable;

  const double tol = 1e-9 * scale;
  const bool symmetric = std::abs(std::abs(model.g12) - std::abs(model.g23)) <= tol &&
                         std::abs(model.gamma[0] - model.gamma[2]) <= tol &&
                         std::abs(model.delta2) <= tol && std::abs(model.delta3) <= tol;
  if (symmetric) report.closed_form = symmetric_stability(model.gamma[0], model.gamma[1], model.g12);
  return report;
}

}  // namespace casimir3
