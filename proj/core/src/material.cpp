#include "casimir3/material.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

TabulatedPermittivity::TabulatedPermittivity(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("tabulated permittivity is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto [xi, eps] = points_[i];
    if (!(xi > 0.0) || !std::isfinite(xi))
      throw ConfigError("tabulated frequency must be positive and finite (row " +
                        std::to_string(i) + ")");
    if (!(eps >= 1.0) || !std::isfinite(eps))
      throw ConfigError("tabulated permittivity must be >= 1 (row " + std::to_string(i) + ")");
    if (i > 0) {
      if (!(xi > points_[i - 1].first))
        throw ConfigError("tabulated frequencies must be strictly increasing (row " +
                          std::to_string(i) + ")");
      if (eps > points_[i - 1].second)
        throw ConfigError("tabulated permittivity must be non-increasing in frequency (row " +
                          std::to_string(i) + ")");
    }
  }
}

TabulatedPermittivity TabulatedPermittivity::read(std::istream& in) {
  std::vector<std::pair<double, double>> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double xi = 0.0;
    double eps = 0.0;
    if (!(row >> xi >> eps))
      throw ConfigError("malformed permittivity row at line " + std::to_string(line_no));
    points.emplace_back(xi, eps);
  }
  return TabulatedPermittivity(std::move(points));
}

TabulatedPermittivity TabulatedPermittivity::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open permittivity table '" + path.string() + "'");
  return read(in);
}

double TabulatedPermittivity::operator()(double xi) const {
  if (xi <= points_.front().first) return points_.front().second;
  if (xi >= points_.back().first) return points_.back().second;
  const auto hi = std::upper_bound(points_.begin(), points_.end(), xi,
                                   [](double v, const auto& p) { return v < p.first; });
  const auto lo = hi - 1;
  const double t = std::log(xi / lo->first) / std::log(hi->first / lo->first);
  return std::exp(std::log(lo->second) + t * (std::log(hi->second) - std::log(lo->second)));
}

MaterialModel::MaterialModel(Kind kind) : kind_(std::move(kind)) {
  if (const auto* d = std::get_if<Drude>(&kind_)) {
    if (!(d->plasma_frequency > 0.0) || !(d->relaxation_rate > 0.0))
      throw ConfigError("Drude parameters must be strictly positive");
  }
  if (const auto* p = std::get_if<Plasma>(&kind_)) {
    if (!(p->plasma_frequency > 0.0))
      throw ConfigError("plasma frequency must be strictly positive");
  }
}

MaterialModel MaterialModel::drude(double plasma_frequency, double relaxation_rate) {
  return MaterialModel(Drude{plasma_frequency, relaxation_rate});
}

MaterialModel MaterialModel::plasma(double plasma_frequency) {
  return MaterialModel(Plasma{plasma_frequency});
}

MaterialModel MaterialModel::tabulated(TabulatedPermittivity table) {
  return MaterialModel(std::move(table));
}

MaterialModel MaterialModel::gold_drude() {
  return drude(units::ev_to_rad_per_s(9.0), units::ev_to_rad_per_s(0.035));
}

MaterialModel MaterialModel::gold_plasma() { return plasma(units::ev_to_rad_per_s(9.0)); }

std::string MaterialModel::describe() const {
  return std::visit(
      Overloaded{
          [](const IdealConductor&) { return std::string("ideal"); },
          [](const Drude& d) {
            return "drude(wp=" + format_double(d.plasma_frequency) +
                   " rad/s, gamma=" + format_double(d.relaxation_rate) + " rad/s)";
          },
          [](const Plasma& p) {
            return "plasma(wp=" + format_double(p.plasma_frequency) + " rad/s)";
          },
          [](const TabulatedPermittivity& t) {
            return "tabulated(" + std::to_string(t.points().size()) + " points)";
          },
      },
      kind_);
}

Permittivity permittivity_at(const MaterialModel& material, double xi) {
  if (!(xi >= 0.0)) throw DomainError("imaginary frequency must be >= 0");
  return std::visit(
      Overloaded{
          [](const IdealConductor&) { return Permittivity{0.0, true}; },
          [xi](const Drude& d) {
            if (xi == 0.0) return Permittivity{0.0, true};
            const double wp2 = d.plasma_frequency * d.plasma_frequency;
            return Permittivity{1.0 + wp2 / (xi * (xi + d.relaxation_rate)), false};
          },
          [xi](const Plasma& p) {
            if (xi == 0.0) return Permittivity{0.0, true};
            const double wp = p.plasma_frequency / xi;
            return Permittivity{1.0 + wp * wp, false};
          },
          [xi](const TabulatedPermittivity& t) { return Permittivity{t(xi), false}; },
      },
      material.kind());
}

namespace detail {

Response response_at(const MaterialModel& material, double xi) {
  if (!(xi >= 0.0)) throw DomainError("imaginary frequency must be >= 0");
  constexpr double c = kCodata2018.c;
  return std::visit(
      Overloaded{
          [](const IdealConductor&) { return Response{0.0, 0.0, true, true}; },
          [xi](const Drude& d) {
            const double wp2 = d.plasma_frequency * d.plasma_frequency;
            // (ε - 1) ξ² = ω_p² ξ / (ξ + γ_D)
            const double excess = wp2 * xi / (xi + d.relaxation_rate) / (c * c);
            if (xi == 0.0) return Response{0.0, excess, false, true};
            return Response{1.0 + wp2 / (xi * (xi + d.relaxation_rate)), excess, false, false};
          },
          [xi](const Plasma& p) {
            const double wp2 = p.plasma_frequency * p.plasma_frequency;
            const double excess = wp2 / (c * c);
            if (xi == 0.0) return Response{0.0, excess, false, true};
            return Response{1.0 + wp2 / (xi * xi), excess, false, false};
          },
          [xi](const TabulatedPermittivity& t) {
            const double eps = t(xi);
            return Response{eps, (eps - 1.0) * xi * xi / (c * c), false, false};
          },
      },
      material.kind());
}

}  // namespace detail

ReflectionCoefficients reflection_coefficients(const MaterialModel& material, double xi,
                                               double k_perp) {
  if (!(xi >= 0.0)) throw DomainError("imaginary frequency must be >= 0");
  if (!(k_perp >= 0.0)) throw DomainError("in-plane wave number must be >= 0");
  if (xi == 0.0 && k_perp == 0.0)
    throw DomainError("reflection coefficients undefined at xi = k_perp = 0");
  const auto response = detail::response_at(material, xi);
  const double q = std::hypot(k_perp, xi / kCodata2018.c);
  return detail::reflection_from_q(response, q);
}

}  // namespace casimir3
