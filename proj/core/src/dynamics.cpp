#include "casimir3/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

namespace {

std::string state_dump(double t, const std::array<double, 6>& y) {
  std::ostringstream os;
  os.precision(10);
  os << "t = " << t << " s, x = (" << y[0] << ", " << y[1] << ", " << y[2] << ") m, v = ("
     << y[3] << ", " << y[4] << ", " << y[5] << ") m/s";
  return os.str();
}

}  // namespace

std::array<double, 2> instantaneous_gaps(const Geometry& geom, const ModulationSettings& mods,
                                         const SimulationState& state) {
  const double s = mods.delta_d1 * std::cos(mods.omega_mod1 * state.t) +
                   mods.delta_d2 * std::cos(mods.omega_mod2 * state.t);
  const double d1 = geom.d1 - s + state.x[0] - state.x[1];
  const double d2 = geom.d2 + s + state.x[1] - state.x[2];
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw ContactError("non-positive gap at " + std::to_string(state.t) + " s", state.t);
  return {d1, d2};
}

Simulator::Simulator(SimulationSetup setup) : setup_(std::move(setup)) {
  for (std::size_t i = 0; i < 3; ++i)
    setup_.cantilevers[i].validate(("cantilevers[" + std::to_string(i) + "]").c_str());
  if (setup_.drive.target < 1 || setup_.drive.target > 3)
    throw ConfigError("drive target must be 1, 2 or 3", "drive.target");
  if (!(setup_.drive.amplitude >= 0.0))
    throw ConfigError("drive amplitude must be >= 0", "drive.amplitude");
  if (!(setup_.noise.temperature >= 0.0))
    throw ConfigError("noise temperature must be >= 0", "noise.temperature");

  double f_max = std::abs(setup_.drive.frequency) / units::kTwoPi;
  for (const auto& c : setup_.cantilevers) f_max = std::max(f_max, c.omega / units::kTwoPi);
  max_dt_ = 1.0 / (200.0 * f_max);

  if (setup_.about_equilibrium) {
    if (setup_.table1) static_force_[0] = setup_.table1->force(setup_.geometry.d1);
    if (setup_.table2) static_force_[1] = setup_.table2->force(setup_.geometry.d2);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = setup_.cantilevers[i];
    noise_sigma_rate_[i] = setup_.noise.enabled ? 2.0 * kCodata2018.k_B *
                                                      setup_.noise.temperature *
                                                      setup_.noise_gamma[i] / c.mass
                                                : 0.0;
  }
  divergence_bound_ = setup_.divergence_bound > 0.0
                          ? setup_.divergence_bound
                          : 0.5 * std::min(setup_.geometry.d1, setup_.geometry.d2);
}

Simulator::Vec6 Simulator::derivative(double t, const Vec6& y) const {
  const auto& mods = setup_.modulation;
  const auto& geom = setup_.geometry;
  const double s =
      mods.delta_d1 * std::cos(mods.omega_mod1 * t) + mods.delta_d2 * std::cos(mods.omega_mod2 * t);
  const double d1 = geom.d1 - s + y[0] - y[1];
  const double d2 = geom.d2 + s + y[1] - y[2];
  const double f1 = setup_.table1 ? setup_.table1->force(d1) - static_force_[0] : 0.0;
  const double f2 = setup_.table2 ? setup_.table2->force(d2) - static_force_[1] : 0.0;

  std::array<double, 3> force{-f1, f1 - f2, f2};
  const auto& drive = setup_.drive;
  if (drive.amplitude != 0.0)
    force[static_cast<std::size_t>(drive.target - 1)] +=
        drive.amplitude * std::cos(drive.frequency * t + drive.phase);

  Vec6 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (setup_.clamped[i]) continue;
    const auto& c = setup_.cantilevers[i];
    out[i] = y[i + 3];
    out[i + 3] = force[i] / c.mass - c.gamma * y[i + 3] - c.omega * c.omega * y[i];
  }
  return out;
}

void Simulator::check_gaps(double t, const Vec6& y) const {
  for (double v : y)
    if (!std::isfinite(v)) throw NumericalError("non-finite state: " + state_dump(t, y));
  for (std::size_t i = 0; i < 3; ++i)
    if (std::abs(y[i]) > divergence_bound_)
      throw InstabilityError("displacement beyond the linear-regime bound: " + state_dump(t, y),
                             t);
  const auto& mods = setup_.modulation;
  const auto& geom = setup_.geometry;
  // Worst case over the modulation cycle.
  const double s_max = mods.delta_d1 + mods.delta_d2;
  const double d1 = geom.d1 - s_max + y[0] - y[1];
  const double d2 = geom.d2 - s_max + y[1] - y[2];
  auto check = [&](double d, const CasimirTable* table, const char* name) {
    const double floor = table ? std::max(setup_.contact_gap, table->min_separation())
                               : setup_.contact_gap;
    if (d < floor) {
      std::ostringstream os;
      os << "contact: " << name << " can reach " << d * 1e9 << " nm (< " << floor * 1e9
         << " nm); " << state_dump(t, y);
      throw ContactError(os.str(), t);
    }
  };
  check(d1, setup_.table1, "d1");
  check(d2, setup_.table2, "d2");
  const double d1_hi = geom.d1 + s_max + y[0] - y[1];
  const double d2_hi = geom.d2 + s_max + y[1] - y[2];
  if ((setup_.table1 && d1_hi > setup_.table1->max_separation()) ||
      (setup_.table2 && d2_hi > setup_.table2->max_separation()))
    throw ContactError("gap left the Casimir table range: " + state_dump(t, y), t);
}

void Simulator::advance(SimulationState& state, double dt) const {
  if (!(dt > 0.0) || dt > max_dt_ * (1.0 + 1e-12))
    throw PreconditionError("time step exceeds 1/(200 f_max)");
  Vec6 y{state.x[0], state.x[1], state.x[2], state.v[0], state.v[1], state.v[2]};
  check_gaps(state.t, y);
  const double t = state.t;
  const Vec6 k1 = derivative(t, y);
  Vec6 tmp;
  for (std::size_t i = 0; i < 6; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  const Vec6 k2 = derivative(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < 6; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  const Vec6 k3 = derivative(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < 6; ++i) tmp[i] = y[i] + dt * k3[i];
  const Vec6 k4 = derivative(t + dt, tmp);
  for (std::size_t i = 0; i < 6; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  if (setup_.noise.enabled) {
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < 3; ++i) {
      if (setup_.clamped[i]) continue;
      y[i + 3] += std::sqrt(noise_sigma_rate_[i] * dt) * normal(state.rng);
    }
  }
  state.t = t + dt;
  for (std::size_t i = 0; i < 3; ++i) {
    state.x[i] = y[i];
    state.v[i] = y[i + 3];
  }
}

int Simulator::steps_per_sample(double sample_rate) const {
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  return static_cast<int>(std::ceil(1.0 / (sample_rate * max_dt_) - 1e-9));
}

Recording Simulator::run(SimulationState& state, double sample_rate, int steps_per_sample,
                         double duration, double record_from) const {
  if (steps_per_sample < 1) throw ConfigError("steps per sample must be >= 1");
  const double dt = 1.0 / (sample_rate * steps_per_sample);
  const auto samples = static_cast<long>(std::llround(duration * sample_rate));
  const auto skip = static_cast<long>(std::llround(std::max(0.0, record_from - state.t) * sample_rate));
  const double t0 = state.t;
  Recording rec;
  rec.sample_rate = sample_rate;
  rec.start_time = t0 + static_cast<double>(skip + 1) / sample_rate;
  for (auto& x : rec.x) x.reserve(static_cast<std::size_t>(std::max(0L, samples - skip)));
  for (long n = 0; n < samples; ++n) {
    for (int k = 0; k < steps_per_sample; ++k) advance(state, dt);
    // Re-anchor time to the sample grid so long runs do not accumulate drift.
    state.t = t0 + static_cast<double>(n + 1) / sample_rate;
    if (n + 1 > skip)
      for (std::size_t i = 0; i < 3; ++i) rec.x[i].push_back(state.x[i]);
  }
  return rec;
}

std::array<double, 3> static_equilibrium(const SimulationSetup& setup) {
  const auto& g = setup.geometry;
  auto residual = [&](const Eigen::Vector3d& x) {
    const double d1 = g.d1 + x(0) - x(1);
    const double d2 = g.d2 + x(1) - x(2);
    const double f1 = setup.table1 ? setup.table1->force(d1) : 0.0;
    const double f2 = setup.table2 ? setup.table2->force(d2) : 0.0;
    Eigen::Vector3d r;
    r << setup.cantilevers[0].k_spring * x(0) + f1,
        setup.cantilevers[1].k_spring * x(1) - f1 + f2,
        setup.cantilevers[2].k_spring * x(2) - f2;
    return r;
  };
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int iter = 0; iter < 100; ++iter) {
    const double d1 = g.d1 + x(0) - x(1);
    const double d2 = g.d2 + x(1) - x(2);
    const double k1 = setup.table1 ? setup.table1->evaluate(d1).gradient : 0.0;
    const double k2 = setup.table2 ? setup.table2->evaluate(d2).gradient : 0.0;
    Eigen::Matrix3d J;
    J << setup.cantilevers[0].k_spring + k1, -k1, 0.0,
        -k1, setup.cantilevers[1].k_spring + k1 + k2, -k2,
        0.0, -k2, setup.cantilevers[2].k_spring + k2;
    const Eigen::Vector3d dx = J.partialPivLu().solve(-residual(x));
    x += dx;
    if (dx.norm() <= 1e-15 * (1.0 + x.norm()) + 1e-24) break;
  }
  return {x(0), x(1), x(2)};
}

void TraceSet::write_csv(std::ostream& out) const {
  out << "t_s,x1_m,x2_m,x3_m\n";
  const auto old = out.precision(17);
  for (std::size_t n = 0; n < size(); ++n)
    out << start_time + static_cast<double>(n) / sample_rate << ',' << traces[0][n] << ','
        << traces[1][n] << ',' << traces[2][n] << '\n';
  out.precision(old);
}

}  // namespace casimir3
