#include "casimir3/casimir_table.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "casimir3/errors.hpp"

namespace casimir3 {

namespace {

constexpr const char* kCsvHeader =
    "separation_m,force_N,gradient_N_per_m,curvature_N_per_m2,temperature_K";

std::string fmt_nm(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x * 1e9 << " nm";
  return os.str();
}

}  // namespace

CasimirTable CasimirTable::build(const MaterialModel& material, double sphere_radius,
                                 double temperature, const TableGrid& grid, int threads) {
  if (grid.points < 4) throw ConfigError("table grid needs at least 4 points");
  if (!(grid.min_separation > 0.0 && grid.max_separation > grid.min_separation))
    throw ConfigError("table grid bounds must satisfy 0 < min < max");

  const auto n = static_cast<std::size_t>(grid.points);
  std::vector<double> xs(n);
  const double log_ratio = std::log(grid.max_separation / grid.min_separation);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = grid.min_separation * std::exp(log_ratio * static_cast<double>(i) /
                                           static_cast<double>(n - 1));
  xs.back() = grid.max_separation;

  std::vector<ForceDerivatives> values(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride)
      values[i] = pfa_sphere_plate(material, sphere_radius, xs[i], temperature);
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<double> f(n), g(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = values[i].force;
    g[i] = values[i].gradient;
    c[i] = values[i].curvature;
  }
  return from_columns(std::move(xs), std::move(f), std::move(g), std::move(c), temperature,
                      material);
}

CasimirTable CasimirTable::from_columns(std::vector<double> separations,
                                        std::vector<double> force,
                                        std::vector<double> gradient,
                                        std::vector<double> curvature, double temperature,
                                        std::optional<MaterialModel> material) {
  const auto n = separations.size();
  if (n < 2 || force.size() != n || gradient.size() != n || curvature.size() != n)
    throw ConfigError("table columns must have equal length >= 2");
  for (std::size_t i = 1; i < n; ++i)
    if (!(separations[i] > separations[i - 1]))
      throw ConfigError("table separations must be strictly increasing");
  CasimirTable t;
  t.separations_ = std::move(separations);
  t.force_ = std::move(force);
  t.gradient_ = std::move(gradient);
  t.curvature_ = std::move(curvature);
  t.temperature_ = temperature;
  t.material_ = std::move(material);
  t.build_coefficients();
  return t;
}

void CasimirTable::build_coefficients() {
  const auto n = separations_.size();
  coefficients_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = separations_[i + 1] - separations_[i];
    const double f0 = force_[i], f1 = force_[i + 1];
    const double d0 = gradient_[i] * h, d1 = gradient_[i + 1] * h;
    const double s0 = curvature_[i] * h * h, s1 = curvature_[i + 1] * h * h;
    // Quintic p(s) = Σ a_k s^k on s ∈ [0, 1] matching value, slope and
    // second derivative at both ends.
    const double a0 = f0;
    const double a1 = d0;
    const double a2 = 0.5 * s0;
    const double r0 = f1 - a0 - a1 - a2;
    const double r1 = d1 - a1 - 2.0 * a2;
    const double r2 = s1 - 2.0 * a2;
    const double a3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
    const double a4 = -15.0 * r0 + 7.0 * r1 - r2;
    const double a5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
    // Rescale to t = s h so evaluation needs no division.
    const double ih = 1.0 / h;
    coefficients_[i] = {a0, a1 * ih, a2 * ih * ih, a3 * ih * ih * ih, a4 * ih * ih * ih * ih,
                        a5 * ih * ih * ih * ih * ih};
  }
}

ForceDerivatives CasimirTable::evaluate(double x) const {
  if (!contains(x))
    throw RangeError("separation " + fmt_nm(x) + " outside table range [" +
                     fmt_nm(separations_.front()) + ", " + fmt_nm(separations_.back()) + "]");
  auto it = std::upper_bound(separations_.begin(), separations_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - separations_.begin());
  i = std::clamp<std::size_t>(i, 1, separations_.size() - 1) - 1;
  const auto& a = coefficients_[i];
  const double t = x - separations_[i];
  const double f = a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * (a[4] + t * a[5]))));
  const double g = a[1] + t * (2.0 * a[2] + t * (3.0 * a[3] + t * (4.0 * a[4] + t * 5.0 * a[5])));
  const double c = 2.0 * a[2] + t * (6.0 * a[3] + t * (12.0 * a[4] + t * 20.0 * a[5]));
  return {f, g, c};
}

double CasimirTable::force(double x) const {
  if (!contains(x))
    throw RangeError("separation " + fmt_nm(x) + " outside table range [" +
                     fmt_nm(separations_.front()) + ", " + fmt_nm(separations_.back()) + "]");
  auto it = std::upper_bound(separations_.begin(), separations_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - separations_.begin());
  i = std::clamp<std::size_t>(i, 1, separations_.size() - 1) - 1;
  const auto& a = coefficients_[i];
  const double t = x - separations_[i];
  return a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * (a[4] + t * a[5]))));
}

void CasimirTable::write_csv(std::ostream& out) const {
  out << kCsvHeader << '\n';
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < separations_.size(); ++i)
    out << separations_[i] << ',' << force_[i] << ',' << gradient_[i] << ',' << curvature_[i]
        << ',' << temperature_ << '\n';
  out.precision(old);
}

CasimirTable CasimirTable::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty Casimir table CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ConfigError("unexpected Casimir table header '" + line + "'");
  std::vector<double> xs, f, g, c;
  double temperature = 0.0;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream is(line);
    std::array<double, 5> v{};
    char comma = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(is >> v[k])) throw ConfigError("malformed table row " + std::to_string(row));
      if (k + 1 < v.size() && !(is >> comma && comma == ','))
        throw ConfigError("malformed table row " + std::to_string(row));
    }
    xs.push_back(v[0]);
    f.push_back(v[1]);
    g.push_back(v[2]);
    c.push_back(v[3]);
    temperature = v[4];
  }
  return from_columns(std::move(xs), std::move(f), std::move(g), std::move(c), temperature);
}

GradientCurvature force_derivatives(const CasimirTable& table, double x) {
  const auto xs = table.separations();
  if (!table.contains(x)) throw RangeError("separation " + fmt_nm(x) + " outside table range");
  const double lo_step = xs[1] - xs[0];
  const double hi_step = xs[xs.size() - 1] - xs[xs.size() - 2];
  if (x < xs.front() + lo_step || x > xs.back() - hi_step)
    throw RangeError("separation " + fmt_nm(x) + " within one grid step of the table edge");
  const auto v = table.evaluate(x);
  return {v.gradient, v.curvature};
}

}  // namespace casimir3
